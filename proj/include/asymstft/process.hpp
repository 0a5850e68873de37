#pragma once

#include <memory>
#include <vector>

#include "asymstft/stft.hpp"

namespace asymstft {

/// Causal per-frame spectral processor. Implementations must be
/// shape-preserving (same bin count and channel id out as in),
/// deterministic given the same frame history, and causal: the output
/// for frame k may depend only on frames 0..k.
///
/// Instances are stateful and single-owner; run one instance per stream.
class FrameProcessor {
 public:
  virtual ~FrameProcessor() = default;
  virtual SpectrumFrame process(const SpectrumFrame& frame) = 0;
};

/// Passes every frame through bit-exactly.
std::unique_ptr<FrameProcessor> make_identity_processor();

/// Parameters of the noise-floor gain rule.
struct MagnitudeGainConfig {
  double alpha = 0.98;      // noise-floor smoothing constant, in (0,1)
  double beta = 1.0;        // over-subtraction factor, > 0
  double gain_floor = 0.1;  // minimum gain, in (0,1]

  void validate() const;  // throws ParameterError
};

/// Magnitude-domain noise suppression: per bin, tracks a noise-floor
/// estimate N = min(alpha*N + (1-alpha)*|X|, |X|) seeded with the first
/// frame's magnitude, and applies gain max(gain_floor, 1 - beta*N/|X|).
/// Phase is never altered; channels are tracked independently.
std::unique_ptr<FrameProcessor> make_magnitude_gain_processor(
    const MagnitudeGainConfig& config = {});

/// Applies the given processors in order. Throws ParameterError on an
/// empty list.
std::unique_ptr<FrameProcessor> make_chain(
    std::vector<std::unique_ptr<FrameProcessor>> stages);

}  // namespace asymstft
