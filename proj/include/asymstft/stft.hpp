#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "asymstft/fft.hpp"
#include "asymstft/window.hpp"

namespace asymstft {

class FrameProcessor;

/// Configuration of a streaming analysis/synthesis engine.
struct StftConfig {
  WindowPair window;
  int fft_size = 0;  // 0 means window length; larger values zero-pad
  int num_channels = 1;
  double sample_rate = 32000.0;

  int resolved_fft_size() const noexcept {
    return fft_size > 0 ? fft_size : window.params.length();
  }
  void validate() const;
};

/// One frame of complex spectrum bins (fft_size/2 + 1 for real input).
struct SpectrumFrame {
  std::vector<std::complex<double>> bins;
  std::int64_t frame_index = 0;
  int channel = 0;
};

/// Algorithmic latency of the engine: two hop sizes, independent of the
/// window length.
int algorithmic_latency(const StftConfig& config);

/// Streaming STFT analysis and overlap-add synthesis.
///
/// analyze() buffers arbitrary-length input blocks and emits one frame
/// per completed hop of R samples: the most recent L samples multiplied
/// by the analysis window, zero-padded to fft_size, forward transformed.
/// Stream start has implicit zero history, so the first frame appears
/// after R input samples.
///
/// synthesize() expects frames back in frame_index order per channel,
/// inverse transforms, applies the synthesis window, overlap-adds, and
/// returns the R oldest accumulated samples, which are final because the
/// synthesis support is only 2R. The output stream is the input delayed
/// by exactly 2R samples.
///
/// An engine owns one stream and is not safe for concurrent mutation;
/// distinct engines may share one WindowPair.
class StftEngine {
 public:
  explicit StftEngine(StftConfig config);

  const StftConfig& config() const noexcept { return config_; }
  int latency() const noexcept;  // samples, = 2 * hop
  std::int64_t samples_consumed() const noexcept { return samples_consumed_; }
  std::int64_t frames_emitted() const noexcept { return frames_emitted_; }

  /// Multichannel input, one vector per channel, equal lengths.
  /// Returns completed frames grouped per hop in channel order.
  std::vector<SpectrumFrame> analyze(
      const std::vector<std::vector<double>>& block);

  /// Single-channel convenience; requires num_channels == 1.
  std::vector<SpectrumFrame> analyze(std::span<const double> block);

  /// Returns exactly hop samples of final output for the frame's channel.
  std::vector<double> synthesize(const SpectrumFrame& frame);

  /// Completes the stream: pads the input with zeros so every real input
  /// sample receives both of its overlapping frame contributions (any
  /// tail frames are routed through `tail_processor` when given), drains
  /// the accumulators, and trims so the total output per channel is the
  /// consumed input length plus 2R. Emits nothing for an empty stream.
  /// Further calls on the engine throw StateError.
  std::vector<std::vector<double>> flush(FrameProcessor* tail_processor = nullptr);

 private:
  struct Channel {
    std::vector<double> ring;         // L most recent input samples
    std::int64_t write_pos = 0;
    std::int64_t next_analysis = 0;   // next frame_index to emit
    std::int64_t next_synthesis = 0;  // next frame_index expected back
    std::vector<double> accumulator;  // 3R, input span [(m-2)R, (m+1)R)
    std::int64_t emitted = 0;         // samples returned so far
  };

  SpectrumFrame make_frame(Channel& ch);
  void push_samples(std::span<const double> samples, int channel);

  StftConfig config_;
  RealDft dft_;
  std::vector<Channel> channels_;
  std::vector<double> frame_scratch_;  // fft_size
  std::vector<double> time_scratch_;   // fft_size
  std::vector<std::complex<double>> bin_scratch_;
  int pending_ = 0;  // samples since last frame, shared across channels
  std::int64_t samples_consumed_ = 0;
  std::int64_t frames_emitted_ = 0;
  bool flushed_ = false;
};

}  // namespace asymstft
