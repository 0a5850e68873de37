#include "asymstft/process.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <utility>

#include "asymstft/errors.hpp"

namespace asymstft {

void MagnitudeGainConfig::validate() const {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw ParameterError("alpha must lie in (0, 1), got " +
                         std::to_string(alpha));
  }
  if (!(beta > 0.0)) {
    throw ParameterError("beta must be positive, got " + std::to_string(beta));
  }
  if (!(gain_floor > 0.0) || gain_floor > 1.0) {
    throw ParameterError("gain_floor must lie in (0, 1], got " +
                         std::to_string(gain_floor));
  }
}

namespace {

class IdentityProcessor final : public FrameProcessor {
 public:
  SpectrumFrame process(const SpectrumFrame& frame) override { return frame; }
};

class MagnitudeGainProcessor final : public FrameProcessor {
 public:
  explicit MagnitudeGainProcessor(const MagnitudeGainConfig& config)
      : config_(config) {
    config_.validate();
  }

  SpectrumFrame process(const SpectrumFrame& frame) override {
    std::vector<double>& floor = floors_[frame.channel];
    if (floor.empty()) {
      floor.resize(frame.bins.size());
      for (std::size_t k = 0; k < frame.bins.size(); ++k) {
        floor[k] = std::abs(frame.bins[k]);
      }
    } else if (floor.size() != frame.bins.size()) {
      throw ShapeError("frame bin count changed mid-stream from " +
                       std::to_string(floor.size()) + " to " +
                       std::to_string(frame.bins.size()));
    }
    SpectrumFrame out = frame;
    for (std::size_t k = 0; k < frame.bins.size(); ++k) {
      const double mag = std::abs(frame.bins[k]);
      floor[k] = std::min(config_.alpha * floor[k] +
                              (1.0 - config_.alpha) * mag,
                          mag);
      const double gain = std::max(
          config_.gain_floor,
          1.0 - config_.beta * floor[k] / std::max(mag, 1e-12));
      out.bins[k] *= gain;
    }
    return out;
  }

 private:
  MagnitudeGainConfig config_;
  std::unordered_map<int, std::vector<double>> floors_;
};

class ChainProcessor final : public FrameProcessor {
 public:
  explicit ChainProcessor(std::vector<std::unique_ptr<FrameProcessor>> stages)
      : stages_(std::move(stages)) {}

  SpectrumFrame process(const SpectrumFrame& frame) override {
    SpectrumFrame current = stages_.front()->process(frame);
    for (std::size_t i = 1; i < stages_.size(); ++i) {
      current = stages_[i]->process(current);
    }
    return current;
  }

 private:
  std::vector<std::unique_ptr<FrameProcessor>> stages_;
};

}  // namespace

std::unique_ptr<FrameProcessor> make_identity_processor() {
  return std::make_unique<IdentityProcessor>();
}

std::unique_ptr<FrameProcessor> make_magnitude_gain_processor(
    const MagnitudeGainConfig& config) {
  return std::make_unique<MagnitudeGainProcessor>(config);
}

std::unique_ptr<FrameProcessor> make_chain(
    std::vector<std::unique_ptr<FrameProcessor>> stages) {
  if (stages.empty()) {
    throw ParameterError("processor chain must contain at least one stage");
  }
  for (const auto& stage : stages) {
    if (stage == nullptr) {
      throw ParameterError("processor chain must not contain null stages");
    }
  }
  return std::make_unique<ChainProcessor>(std::move(stages));
}

}  // namespace asymstft
