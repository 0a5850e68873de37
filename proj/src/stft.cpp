#include "asymstft/stft.hpp"

#include <algorithm>
#include <string>

#include "asymstft/errors.hpp"
#include "asymstft/process.hpp"

namespace asymstft {

void StftConfig::validate() const {
  window.params.validate();
  const auto length = static_cast<std::size_t>(window.params.length());
  if (window.analysis.size() != length || window.synthesis.size() != length) {
    throw ShapeError("window vectors must have length n2 + hop = " +
                     std::to_string(length));
  }
  if (fft_size != 0) {
    if (fft_size < window.params.length()) {
      throw ParameterError("fft_size " + std::to_string(fft_size) +
                           " is smaller than the window length " +
                           std::to_string(window.params.length()));
    }
    if (fft_size % 2 != 0) {
      throw ParameterError("fft_size must be even, got " +
                           std::to_string(fft_size));
    }
  }
  if (num_channels < 1) {
    throw ParameterError("num_channels must be at least 1, got " +
                         std::to_string(num_channels));
  }
  if (!(sample_rate > 0.0)) {
    throw ParameterError("sample_rate must be positive");
  }
}

int algorithmic_latency(const StftConfig& config) {
  config.validate();
  return 2 * config.window.params.hop;
}

namespace {

int validated_fft_size(const StftConfig& config) {
  config.validate();
  return config.resolved_fft_size();
}

}  // namespace

StftEngine::StftEngine(StftConfig config)
    : config_(std::move(config)), dft_(validated_fft_size(config_)) {
  const int length = config_.window.params.length();
  const int hop = config_.window.params.hop;
  channels_.resize(static_cast<std::size_t>(config_.num_channels));
  for (Channel& ch : channels_) {
    ch.ring.assign(static_cast<std::size_t>(length), 0.0);
    ch.accumulator.assign(static_cast<std::size_t>(3 * hop), 0.0);
  }
  frame_scratch_.assign(static_cast<std::size_t>(dft_.size()), 0.0);
  time_scratch_.assign(static_cast<std::size_t>(dft_.size()), 0.0);
  bin_scratch_.resize(static_cast<std::size_t>(dft_.bins()));
}

int StftEngine::latency() const noexcept {
  return 2 * config_.window.params.hop;
}

SpectrumFrame StftEngine::make_frame(Channel& ch) {
  const int length = config_.window.params.length();
  const std::int64_t start = ch.write_pos - length;
  for (int n = 0; n < length; ++n) {
    const std::int64_t idx = start + n;
    const auto slot = static_cast<std::size_t>(((idx % length) + length) %
                                               length);
    frame_scratch_[static_cast<std::size_t>(n)] =
        config_.window.analysis[static_cast<std::size_t>(n)] * ch.ring[slot];
  }
  std::fill(frame_scratch_.begin() + length, frame_scratch_.end(), 0.0);
  SpectrumFrame frame;
  frame.bins.resize(static_cast<std::size_t>(dft_.bins()));
  dft_.forward(frame_scratch_, frame.bins);
  frame.frame_index = ch.next_analysis++;
  return frame;
}

void StftEngine::push_samples(std::span<const double> samples, int channel) {
  Channel& ch = channels_[static_cast<std::size_t>(channel)];
  const int length = config_.window.params.length();
  for (const double sample : samples) {
    ch.ring[static_cast<std::size_t>(ch.write_pos %
                                     static_cast<std::int64_t>(length))] =
        sample;
    ++ch.write_pos;
  }
}

std::vector<SpectrumFrame> StftEngine::analyze(
    const std::vector<std::vector<double>>& block) {
  if (flushed_) {
    throw StateError("analyze called on a flushed engine");
  }
  if (static_cast<int>(block.size()) != config_.num_channels) {
    throw ShapeError("expected " + std::to_string(config_.num_channels) +
                     " channels, got " + std::to_string(block.size()));
  }
  const std::size_t block_len = block.empty() ? 0 : block[0].size();
  for (const auto& channel_block : block) {
    if (channel_block.size() != block_len) {
      throw ShapeError("all channels must supply the same number of samples");
    }
  }

  const int hop = config_.window.params.hop;
  std::vector<SpectrumFrame> out;
  std::size_t offset = 0;
  while (offset < block_len) {
    const std::size_t take =
        std::min(static_cast<std::size_t>(hop - pending_), block_len - offset);
    for (int c = 0; c < config_.num_channels; ++c) {
      push_samples(std::span<const double>(block[static_cast<std::size_t>(c)])
                       .subspan(offset, take),
                   c);
    }
    pending_ += static_cast<int>(take);
    samples_consumed_ += static_cast<std::int64_t>(take);
    offset += take;
    if (pending_ == hop) {
      for (int c = 0; c < config_.num_channels; ++c) {
        SpectrumFrame frame = make_frame(channels_[static_cast<std::size_t>(c)]);
        frame.channel = c;
        out.push_back(std::move(frame));
        ++frames_emitted_;
      }
      pending_ = 0;
    }
  }
  return out;
}

std::vector<SpectrumFrame> StftEngine::analyze(std::span<const double> block) {
  if (config_.num_channels != 1) {
    throw ShapeError("single-span analyze requires a one-channel engine");
  }
  std::vector<std::vector<double>> wrapped(1);
  wrapped[0].assign(block.begin(), block.end());
  return analyze(wrapped);
}

std::vector<double> StftEngine::synthesize(const SpectrumFrame& frame) {
  if (flushed_) {
    throw StateError("synthesize called on a flushed engine");
  }
  if (frame.channel < 0 || frame.channel >= config_.num_channels) {
    throw ShapeError("frame channel " + std::to_string(frame.channel) +
                     " out of range for " +
                     std::to_string(config_.num_channels) + " channels");
  }
  if (static_cast<int>(frame.bins.size()) != dft_.bins()) {
    throw ShapeError("frame has " + std::to_string(frame.bins.size()) +
                     " bins, engine expects " + std::to_string(dft_.bins()));
  }
  Channel& ch = channels_[static_cast<std::size_t>(frame.channel)];
  if (frame.frame_index != ch.next_synthesis) {
    throw StateError("expected frame " + std::to_string(ch.next_synthesis) +
                     " for channel " + std::to_string(frame.channel) +
                     ", got " + std::to_string(frame.frame_index));
  }
  if (frame.frame_index >= ch.next_analysis) {
    throw StateError("frame " + std::to_string(frame.frame_index) +
                     " has not been produced by this engine yet");
  }

  dft_.inverse(frame.bins, time_scratch_);

  const int length = config_.window.params.length();
  const int hop = config_.window.params.hop;
  // The synthesis window is zero before n2 - hop, so the frame only
  // contributes its last 2R samples; they land on the newest two hops of
  // the accumulator, leaving the oldest hop final.
  for (int n = length - 2 * hop; n < length; ++n) {
    ch.accumulator[static_cast<std::size_t>(n - (length - 3 * hop))] +=
        config_.window.synthesis[static_cast<std::size_t>(n)] *
        time_scratch_[static_cast<std::size_t>(n)];
  }
  std::vector<double> out(ch.accumulator.begin(), ch.accumulator.begin() + hop);
  std::copy(ch.accumulator.begin() + hop, ch.accumulator.end(),
            ch.accumulator.begin());
  std::fill(ch.accumulator.end() - hop, ch.accumulator.end(), 0.0);
  ch.emitted += hop;
  ++ch.next_synthesis;
  return out;
}

std::vector<std::vector<double>> StftEngine::flush(
    FrameProcessor* tail_processor) {
  if (flushed_) {
    throw StateError("flush called twice");
  }
  for (const Channel& ch : channels_) {
    if (ch.next_synthesis != ch.next_analysis) {
      throw StateError(
          "flush requires every emitted frame to be synthesized first; "
          "channel is " +
          std::to_string(ch.next_analysis - ch.next_synthesis) +
          " frame(s) behind");
    }
  }

  const int hop = config_.window.params.hop;
  const std::int64_t consumed = samples_consumed_;
  std::vector<std::vector<double>> out(
      static_cast<std::size_t>(config_.num_channels));
  if (consumed == 0) {
    flushed_ = true;
    return out;
  }

  // Pad with zeros until every real input sample has received both of its
  // overlapping synthesis contributions: one frame past the last hop
  // boundary at or after the stream end.
  const std::int64_t frames_done = channels_[0].next_analysis;
  const std::int64_t frames_total = frames_done + (pending_ > 0 ? 2 : 1);
  const std::vector<double> zeros(static_cast<std::size_t>(hop), 0.0);
  while (channels_[0].next_analysis < frames_total) {
    const int need = hop - pending_;
    for (int c = 0; c < config_.num_channels; ++c) {
      Channel& ch = channels_[static_cast<std::size_t>(c)];
      push_samples(std::span<const double>(zeros).first(
                       static_cast<std::size_t>(need)),
                   c);
      SpectrumFrame frame = make_frame(ch);
      frame.channel = c;
      ++frames_emitted_;
      const SpectrumFrame& processed =
          tail_processor != nullptr ? (frame = tail_processor->process(frame))
                                    : frame;
      std::vector<double> hop_out = synthesize(processed);
      out[static_cast<std::size_t>(c)].insert(
          out[static_cast<std::size_t>(c)].end(), hop_out.begin(),
          hop_out.end());
    }
    pending_ = 0;
  }

  // Drain the two hops still sitting in each accumulator, then trim the
  // zero-padding tail so the stream totals consumed + 2R samples.
  const auto target =
      static_cast<std::size_t>(consumed + 2 * hop - frames_done * hop);
  for (int c = 0; c < config_.num_channels; ++c) {
    Channel& ch = channels_[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(c)].insert(
        out[static_cast<std::size_t>(c)].end(), ch.accumulator.begin(),
        ch.accumulator.begin() + 2 * hop);
    out[static_cast<std::size_t>(c)].resize(target);
  }
  flushed_ = true;
  return out;
}

}  // namespace asymstft
