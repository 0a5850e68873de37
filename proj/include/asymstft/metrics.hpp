#pragma once

#include <span>
#include <vector>

namespace asymstft {

/// Resolutions for the multi-resolution magnitude loss. Each resolution
/// is a periodic-Hann STFT with hop = window / hop_divisor.
struct MultiResConfig {
  std::vector<int> window_sizes = {128, 256, 512, 1024, 2048};
  int hop_divisor = 4;

  void validate() const;  // throws ParameterError
};

struct MultiResResult {
  std::vector<double> per_resolution;
  double aggregate = 0.0;
};

/// L2 loss between magnitude spectrograms, mean over frames and bins per
/// resolution, then mean over resolutions. Signals must have equal
/// length >= the largest window size.
double multires_mag_loss(std::span<const double> reference,
                         std::span<const double> estimate,
                         const MultiResConfig& config = {});

/// Same, with the per-resolution breakdown.
MultiResResult multires_mag_loss_detail(std::span<const double> reference,
                                        std::span<const double> estimate,
                                        const MultiResConfig& config = {});

/// Delay and SNR of an estimate against a reference: delay maximizes the
/// cross-correlation of the delayed reference with the estimate over
/// [0, max_delay]; SNR is measured on the overlapping interior and is
/// +infinity when the aligned residual is exactly zero.
struct DelaySnr {
  int delay = 0;
  double snr_db = 0.0;
};

DelaySnr measure_delay_snr(std::span<const double> reference,
                           std::span<const double> estimate, int max_delay);

}  // namespace asymstft
