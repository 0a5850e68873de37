#include "asymstft/nalr.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "asymstft/errors.hpp"
#include "asymstft/fft.hpp"

namespace asymstft {

namespace {

constexpr std::array<double, 6> kNalrK = {-17.0, -8.0, 1.0, -1.0, -2.0, -2.0};

/// Target gain in dB at an arbitrary frequency: linear interpolation of
/// the catalog gains on a log-frequency axis, flat outside [250, 6000].
double interp_gain_db(const std::array<double, 6>& gains_db, double freq) {
  if (freq <= kAudiogramFrequencies.front()) {
    return gains_db.front();
  }
  if (freq >= kAudiogramFrequencies.back()) {
    return gains_db.back();
  }
  std::size_t j = 0;
  while (freq > kAudiogramFrequencies[j + 1]) {
    ++j;
  }
  const double lo = std::log(kAudiogramFrequencies[j]);
  const double hi = std::log(kAudiogramFrequencies[j + 1]);
  const double t = (std::log(freq) - lo) / (hi - lo);
  return gains_db[j] + t * (gains_db[j + 1] - gains_db[j]);
}

/// One frequency-sampling pass: sample the interpolated target on
/// nfir/2+1 uniform points, impose zero phase, inverse real DFT, shift
/// the result to be symmetric about tap nfir/2.
std::vector<double> sample_design(const std::array<double, 6>& gains_db,
                                  int nfir, double sample_rate,
                                  RealDft& dft) {
  const int half = nfir / 2;
  std::vector<std::complex<double>> spectrum(
      static_cast<std::size_t>(half + 1));
  for (int i = 0; i <= half; ++i) {
    const double freq = static_cast<double>(i) * sample_rate /
                        static_cast<double>(nfir);
    spectrum[static_cast<std::size_t>(i)] =
        std::pow(10.0, interp_gain_db(gains_db, freq) / 20.0);
  }
  std::vector<double> zero_phase(static_cast<std::size_t>(nfir));
  dft.inverse(spectrum, zero_phase);
  std::vector<double> fir(static_cast<std::size_t>(nfir + 1));
  fir[static_cast<std::size_t>(half)] = zero_phase[0];
  for (int d = 1; d <= half; ++d) {
    fir[static_cast<std::size_t>(half + d)] =
        zero_phase[static_cast<std::size_t>(d)];
    fir[static_cast<std::size_t>(half - d)] =
        zero_phase[static_cast<std::size_t>(d)];
  }
  return fir;
}

}  // namespace

Audiogram make_audiogram(std::span<const double> levels) {
  if (levels.size() != kAudiogramFrequencies.size()) {
    throw ParameterError("an audiogram needs exactly " +
                         std::to_string(kAudiogramFrequencies.size()) +
                         " levels, got " + std::to_string(levels.size()));
  }
  Audiogram audiogram;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i])) {
      throw ParameterError("audiogram level at " +
                           std::to_string(kAudiogramFrequencies[i]) +
                           " Hz is not finite");
    }
    audiogram.levels_db_hl[i] = std::clamp(levels[i], 0.0, 120.0);
  }
  return audiogram;
}

std::vector<Audiogram> load_audiogram_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open audiogram file: " + path);
  }
  std::vector<Audiogram> ears;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream tokens(line);
    std::vector<double> levels;
    std::string token;
    while (tokens >> token) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw ParameterError(path + ":" + std::to_string(line_number) +
                             ": not a number: '" + token + "'");
      }
      levels.push_back(value);
    }
    if (levels.empty()) {
      continue;  // blank line
    }
    if (levels.size() != kAudiogramFrequencies.size()) {
      throw ParameterError(path + ":" + std::to_string(line_number) +
                           ": expected " +
                           std::to_string(kAudiogramFrequencies.size()) +
                           " levels, got " + std::to_string(levels.size()));
    }
    ears.push_back(make_audiogram(levels));
  }
  if (ears.empty()) {
    throw ParameterError(path + ": no audiograms found");
  }
  return ears;
}

std::array<double, 6> nalr_gains(const Audiogram& audiogram) {
  const auto& hl = audiogram.levels_db_hl;
  const double x = 0.05 * (hl[1] + hl[2] + hl[3]);
  std::array<double, 6> gains{};
  for (std::size_t i = 0; i < gains.size(); ++i) {
    gains[i] = std::max(0.0, x + 0.31 * hl[i] + kNalrK[i]);
  }
  return gains;
}

std::vector<double> design_fir(const std::array<double, 6>& gains_db,
                               int nfir, double sample_rate) {
  if (nfir < 32 || nfir % 2 != 0) {
    throw ParameterError("nfir must be even and at least 32, got " +
                         std::to_string(nfir));
  }
  if (!(sample_rate >= 2.0 * kAudiogramFrequencies.back())) {
    throw ParameterError("sample_rate must be at least " +
                         std::to_string(2.0 * kAudiogramFrequencies.back()) +
                         " Hz to realize the full gain catalog");
  }
  RealDft dft(nfir);
  // Frequency sampling hits the target only at the sampling grid; a few
  // damped corrections of the catalog knots pin the realized response to
  // the prescription at the frequencies that matter.
  std::array<double, 6> work = gains_db;
  std::vector<double> fir;
  for (int iteration = 0; iteration < 16; ++iteration) {
    fir = sample_design(work, nfir, sample_rate, dft);
    for (std::size_t j = 0; j < work.size(); ++j) {
      const double realized =
          fir_response_db(fir, kAudiogramFrequencies[j], sample_rate);
      work[j] += 0.7 * (gains_db[j] - realized);
    }
  }
  return sample_design(work, nfir, sample_rate, dft);
}

NalrPrescription make_prescription(const Audiogram& audiogram, int nfir,
                                   double sample_rate) {
  NalrPrescription prescription;
  prescription.gains_db = nalr_gains(audiogram);
  prescription.fir = design_fir(prescription.gains_db, nfir, sample_rate);
  prescription.delay = nfir / 2;
  return prescription;
}

std::vector<double> apply_amplification(std::span<const double> signal,
                                        const NalrPrescription& prescription) {
  const auto taps = static_cast<std::int64_t>(prescription.fir.size());
  if (taps == 0 || taps % 2 == 0 ||
      prescription.delay != static_cast<int>((taps - 1) / 2)) {
    throw ParameterError("prescription FIR must have an odd tap count with "
                         "delay = (taps - 1) / 2");
  }
  const auto len = static_cast<std::int64_t>(signal.size());
  std::vector<double> out(signal.size(), 0.0);
  for (std::int64_t t = 0; t < len; ++t) {
    double acc = 0.0;
    // y[t] = sum_k fir[k] * x[t + delay - k], i.e. full convolution read
    // off delay samples late so the output stays time-aligned.
    const std::int64_t shifted = t + prescription.delay;
    const std::int64_t k_lo = std::max<std::int64_t>(0, shifted - (len - 1));
    const std::int64_t k_hi = std::min<std::int64_t>(taps - 1, shifted);
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      acc += prescription.fir[static_cast<std::size_t>(k)] *
             signal[static_cast<std::size_t>(shifted - k)];
    }
    out[static_cast<std::size_t>(t)] = acc;
  }
  return out;
}

std::vector<double> apply_amplification(std::span<const double> signal,
                                        const Audiogram& ear, int nfir,
                                        double sample_rate) {
  return apply_amplification(signal, make_prescription(ear, nfir, sample_rate));
}

std::vector<std::vector<double>> apply_amplification(
    const std::vector<std::vector<double>>& channels,
    std::span<const Audiogram> ears, int nfir, double sample_rate) {
  if (channels.size() != ears.size()) {
    throw ShapeError("channel count " + std::to_string(channels.size()) +
                     " does not match ear count " +
                     std::to_string(ears.size()));
  }
  std::vector<std::vector<double>> out;
  out.reserve(channels.size());
  for (std::size_t c = 0; c < channels.size(); ++c) {
    out.push_back(
        apply_amplification(channels[c], ears[c], nfir, sample_rate));
  }
  return out;
}

double fir_response_db(std::span<const double> fir, double frequency,
                       double sample_rate) {
  const double omega = 2.0 * std::numbers::pi * frequency / sample_rate;
  std::complex<double> response(0.0, 0.0);
  for (std::size_t n = 0; n < fir.size(); ++n) {
    const double phase = -omega * static_cast<double>(n);
    response += fir[n] * std::complex<double>(std::cos(phase),
                                              std::sin(phase));
  }
  const double magnitude = std::abs(response);
  if (magnitude <= 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  return 20.0 * std::log10(magnitude);
}

}  // namespace asymstft
