#include "asymstft/resample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>

#include "asymstft/errors.hpp"

namespace asymstft {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) {
    --q;
  }
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return -floor_div(-a, b);
}

double sinc(double x) {
  if (x == 0.0) {
    return 1.0;
  }
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

std::vector<double> resample(std::span<const double> input, double from_rate,
                             double to_rate, int taps_per_phase) {
  if (!(from_rate > 0.0) || !(to_rate > 0.0)) {
    throw ParameterError("sample rates must be positive");
  }
  if (taps_per_phase < 8) {
    throw ParameterError("taps_per_phase must be at least 8, got " +
                         std::to_string(taps_per_phase));
  }
  const auto from = static_cast<std::int64_t>(std::llround(from_rate));
  const auto to = static_cast<std::int64_t>(std::llround(to_rate));
  if (from < 1 || to < 1) {
    throw ParameterError("sample rates must round to positive integers");
  }
  const std::int64_t g = std::gcd(from, to);
  const std::int64_t up = to / g;
  const std::int64_t down = from / g;
  if (up == 1 && down == 1) {
    return std::vector<double>(input.begin(), input.end());
  }
  if (input.empty()) {
    return {};
  }

  // Odd-length symmetric lowpass prototype on the up-sampled grid:
  // cutoff below both the source and target Nyquist, Blackman-windowed.
  const std::int64_t proto_len = static_cast<std::int64_t>(taps_per_phase) * up;
  const std::int64_t center = proto_len / 2;
  const double cutoff =
      0.9 * 0.5 * std::min(1.0 / static_cast<double>(up),
                           1.0 / static_cast<double>(down));
  std::vector<double> kernel(static_cast<std::size_t>(proto_len + 1));
  for (std::int64_t m = 0; m <= proto_len; ++m) {
    const double d = static_cast<double>(m - center);
    const double window =
        0.42 -
        0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(m) /
                       static_cast<double>(proto_len)) +
        0.08 * std::cos(4.0 * std::numbers::pi * static_cast<double>(m) /
                        static_cast<double>(proto_len));
    kernel[static_cast<std::size_t>(m)] =
        static_cast<double>(up) * 2.0 * cutoff * sinc(2.0 * cutoff * d) *
        window;
  }

  const auto in_len = static_cast<std::int64_t>(input.size());
  const std::int64_t out_len = floor_div(in_len * up, down);
  std::vector<double> output(static_cast<std::size_t>(out_len), 0.0);
  for (std::int64_t t = 0; t < out_len; ++t) {
    const std::int64_t u = t * down;  // position on the up-sampled grid
    const std::int64_t k_lo = std::max<std::int64_t>(0, ceil_div(u - center, up));
    const std::int64_t k_hi =
        std::min<std::int64_t>(in_len - 1, floor_div(u + center, up));
    double acc = 0.0;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      acc += input[static_cast<std::size_t>(k)] *
             kernel[static_cast<std::size_t>(center + u - k * up)];
    }
    output[static_cast<std::size_t>(t)] = acc;
  }
  return output;
}

}  // namespace asymstft
