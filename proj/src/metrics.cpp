#include "asymstft/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "asymstft/errors.hpp"
#include "asymstft/fft.hpp"

namespace asymstft {

void MultiResConfig::validate() const {
  if (hop_divisor < 1) {
    throw ParameterError("hop_divisor must be positive, got " +
                         std::to_string(hop_divisor));
  }
  if (window_sizes.empty()) {
    throw ParameterError("at least one window size is required");
  }
  for (const int w : window_sizes) {
    if (w % 2 != 0 || w < 2 * hop_divisor) {
      throw ParameterError("window size " + std::to_string(w) +
                           " must be even and at least 2 * hop_divisor");
    }
    if (w % hop_divisor != 0) {
      throw ParameterError("window size " + std::to_string(w) +
                           " must be divisible by hop_divisor " +
                           std::to_string(hop_divisor));
    }
  }
}

namespace {

double resolution_loss(std::span<const double> reference,
                       std::span<const double> estimate, int window,
                       int hop) {
  RealDft dft(window);
  std::vector<double> hann(static_cast<std::size_t>(window));
  for (int n = 0; n < window; ++n) {
    hann[static_cast<std::size_t>(n)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / window);
  }
  const int bins = dft.bins();
  std::vector<double> frame(static_cast<std::size_t>(window));
  std::vector<std::complex<double>> ref_bins(static_cast<std::size_t>(bins));
  std::vector<std::complex<double>> est_bins(static_cast<std::size_t>(bins));

  const auto len = static_cast<std::int64_t>(reference.size());
  const std::int64_t frames = (len - window) / hop + 1;
  double acc = 0.0;
  for (std::int64_t f = 0; f < frames; ++f) {
    const auto start = static_cast<std::size_t>(f * hop);
    for (int n = 0; n < window; ++n) {
      frame[static_cast<std::size_t>(n)] =
          hann[static_cast<std::size_t>(n)] *
          reference[start + static_cast<std::size_t>(n)];
    }
    dft.forward(frame, ref_bins);
    for (int n = 0; n < window; ++n) {
      frame[static_cast<std::size_t>(n)] =
          hann[static_cast<std::size_t>(n)] *
          estimate[start + static_cast<std::size_t>(n)];
    }
    dft.forward(frame, est_bins);
    for (int k = 0; k < bins; ++k) {
      const double diff = std::abs(ref_bins[static_cast<std::size_t>(k)]) -
                          std::abs(est_bins[static_cast<std::size_t>(k)]);
      acc += diff * diff;
    }
  }
  return acc / (static_cast<double>(frames) * static_cast<double>(bins));
}

}  // namespace

MultiResResult multires_mag_loss_detail(std::span<const double> reference,
                                        std::span<const double> estimate,
                                        const MultiResConfig& config) {
  config.validate();
  if (reference.size() != estimate.size()) {
    throw ShapeError("signals differ in length: " +
                     std::to_string(reference.size()) + " vs " +
                     std::to_string(estimate.size()));
  }
  const int max_window =
      *std::max_element(config.window_sizes.begin(),
                        config.window_sizes.end());
  if (reference.size() < static_cast<std::size_t>(max_window)) {
    throw ShapeError("signals must be at least " + std::to_string(max_window) +
                     " samples for the largest window, got " +
                     std::to_string(reference.size()));
  }
  MultiResResult result;
  result.per_resolution.reserve(config.window_sizes.size());
  for (const int window : config.window_sizes) {
    result.per_resolution.push_back(resolution_loss(
        reference, estimate, window, window / config.hop_divisor));
  }
  double total = 0.0;
  for (const double loss : result.per_resolution) {
    total += loss;
  }
  result.aggregate = total / static_cast<double>(result.per_resolution.size());
  return result;
}

double multires_mag_loss(std::span<const double> reference,
                         std::span<const double> estimate,
                         const MultiResConfig& config) {
  return multires_mag_loss_detail(reference, estimate, config).aggregate;
}

DelaySnr measure_delay_snr(std::span<const double> reference,
                           std::span<const double> estimate, int max_delay) {
  if (reference.size() != estimate.size()) {
    throw ShapeError("signals differ in length: " +
                     std::to_string(reference.size()) + " vs " +
                     std::to_string(estimate.size()));
  }
  const auto len = static_cast<std::int64_t>(reference.size());
  if (max_delay < 0 || static_cast<std::int64_t>(max_delay) >= (len + 1) / 2) {
    throw ParameterError("max_delay must lie in [0, length/2), got " +
                         std::to_string(max_delay) + " for length " +
                         std::to_string(len));
  }
  const bool all_zero =
      std::all_of(reference.begin(), reference.end(),
                  [](double v) { return v == 0.0; });
  if (all_zero) {
    throw ParameterError("reference signal is identically zero; SNR undefined");
  }

  DelaySnr result;
  double best = -std::numeric_limits<double>::infinity();
  for (int d = 0; d <= max_delay; ++d) {
    double corr = 0.0;
    for (std::int64_t t = d; t < len; ++t) {
      corr += reference[static_cast<std::size_t>(t - d)] *
              estimate[static_cast<std::size_t>(t)];
    }
    if (corr > best) {
      best = corr;
      result.delay = d;
    }
  }

  double ref_energy = 0.0;
  double residual_energy = 0.0;
  for (std::int64_t t = result.delay; t < len; ++t) {
    const double r = reference[static_cast<std::size_t>(t - result.delay)];
    const double e = estimate[static_cast<std::size_t>(t)];
    ref_energy += r * r;
    residual_energy += (r - e) * (r - e);
  }
  if (residual_energy == 0.0) {
    result.snr_db = std::numeric_limits<double>::infinity();
  } else {
    result.snr_db = 10.0 * std::log10(ref_energy / residual_energy);
  }
  return result;
}

}  // namespace asymstft
