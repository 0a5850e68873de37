#pragma once

#include <span>
#include <vector>

namespace asymstft {

/// Rational-ratio resampler: polyphase windowed sinc with 64 taps per
/// phase (Blackman window). Rates must be positive integers when
/// rounded; a unity ratio returns a copy.
std::vector<double> resample(std::span<const double> input, double from_rate,
                             double to_rate, int taps_per_phase = 64);

}  // namespace asymstft
