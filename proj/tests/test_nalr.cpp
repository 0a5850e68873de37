#include "asymstft/nalr.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "asymstft/errors.hpp"

using namespace asymstft;

namespace {

Audiogram flat(double level) {
  std::array<double, 6> levels;
  levels.fill(level);
  return make_audiogram(levels);
}

/// Independent response measurement: direct transfer-function sum with
/// its own code path (long double accumulation).
double reference_response_db(const std::vector<double>& fir, double freq,
                             double rate) {
  long double re = 0.0L;
  long double im = 0.0L;
  for (std::size_t n = 0; n < fir.size(); ++n) {
    const long double phase = -2.0L * std::numbers::pi_v<long double> *
                              static_cast<long double>(freq) *
                              static_cast<long double>(n) /
                              static_cast<long double>(rate);
    re += static_cast<long double>(fir[n]) * std::cos(phase);
    im += static_cast<long double>(fir[n]) * std::sin(phase);
  }
  return static_cast<double>(
      20.0L * std::log10(std::sqrt(re * re + im * im)));
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/") + name;
}

}  // namespace

TEST_CASE("flat audiograms reproduce the catalog examples") {
  const auto zero_gains = nalr_gains(flat(0.0));
  const std::array<double, 6> expect_zero = {0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  CHECK(zero_gains == expect_zero);

  const auto fifty_gains = nalr_gains(flat(50.0));
  const std::array<double, 6> expect_fifty = {6.0, 15.0, 24.0, 22.0, 21.0, 21.0};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(fifty_gains[i] == doctest::Approx(expect_fifty[i]).epsilon(1e-12));
  }
  CHECK(fifty_gains[2] == 24.0);  // 7.5 + 15.5 + 1
}

TEST_CASE("raising one hearing level never lowers any gain") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> level(5.0, 80.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<double, 6> base_levels;
    for (auto& v : base_levels) {
      v = level(rng);
    }
    const auto base = nalr_gains(make_audiogram(base_levels));
    for (std::size_t j = 0; j < 6; ++j) {
      auto raised_levels = base_levels;
      const double delta = 7.0;
      raised_levels[j] += delta;
      const auto raised = nalr_gains(make_audiogram(raised_levels));
      for (std::size_t i = 0; i < 6; ++i) {
        CHECK(raised[i] >= base[i] - 1e-12);
      }
      // Above the zero floor the slope is exact: 0.31 at the raised
      // frequency plus 0.05 everywhere when j is a mid frequency.
      const bool mid = j == 1 || j == 2 || j == 3;
      if (base[j] > 0.0) {
        const double expect = 0.31 * delta + (mid ? 0.05 * delta : 0.0);
        CHECK(raised[j] - base[j] == doctest::Approx(expect).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("audiogram ingestion clamps and validates") {
  const std::array<double, 6> wild = {-10.0, 150.0, 60.0, 0.0, 120.0, 119.9};
  const auto clamped = make_audiogram(wild);
  CHECK(clamped.levels_db_hl[0] == 0.0);
  CHECK(clamped.levels_db_hl[1] == 120.0);
  CHECK(clamped.levels_db_hl[5] == 119.9);

  const std::vector<double> short_list = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(make_audiogram(short_list), ParameterError);
  const std::array<double, 6> with_nan = {0.0, 0.0, std::nan(""), 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(make_audiogram(with_nan), ParameterError);
}

TEST_CASE("audiogram files parse one ear per line") {
  const auto path = temp_path("nalr_ears_ok.txt");
  std::ofstream(path) << "50 50 50 50 50 50\n"
                      << "\n"
                      << "  30 40\t50 60 70 80  \n";
  const auto ears = load_audiogram_file(path);
  REQUIRE(ears.size() == 2);
  CHECK(ears[0].levels_db_hl[0] == 50.0);
  CHECK(ears[1].levels_db_hl[5] == 80.0);
  std::remove(path.c_str());

  const auto bad_token = temp_path("nalr_ears_bad.txt");
  std::ofstream(bad_token) << "50 50 abc 50 50 50\n";
  CHECK_THROWS_AS(load_audiogram_file(bad_token), ParameterError);
  std::remove(bad_token.c_str());

  const auto wrong_count = temp_path("nalr_ears_count.txt");
  std::ofstream(wrong_count) << "50 50 50\n";
  CHECK_THROWS_AS(load_audiogram_file(wrong_count), ParameterError);
  std::remove(wrong_count.c_str());

  const auto empty = temp_path("nalr_ears_empty.txt");
  std::ofstream(empty) << "\n\n";
  CHECK_THROWS_AS(load_audiogram_file(empty), ParameterError);
  std::remove(empty.c_str());

  CHECK_THROWS_AS(load_audiogram_file("/nonexistent/ears.txt"), IoError);
}

TEST_CASE("flat zero-dB target designs a unit impulse") {
  const std::array<double, 6> zero{};
  const auto fir = design_fir(zero, 220, 32000.0);
  REQUIRE(fir.size() == 221);
  for (int n = 0; n <= 220; ++n) {
    const double expect = n == 110 ? 1.0 : 0.0;
    CHECK(std::abs(fir[static_cast<std::size_t>(n)] - expect) < 1e-12);
  }
}

TEST_CASE("flat gain scales the impulse") {
  std::array<double, 6> doubled;
  doubled.fill(20.0 * std::log10(2.0));  // the "+6.02 dB" flat target
  const auto fir = design_fir(doubled, 220, 32000.0);
  CHECK(std::abs(fir[110] - 2.0) < 1e-9);
  for (int n = 0; n <= 220; ++n) {
    if (n != 110) {
      CHECK(std::abs(fir[static_cast<std::size_t>(n)]) < 1e-9);
    }
  }
}

TEST_CASE("design rejects bad shapes and rates") {
  const std::array<double, 6> zero{};
  CHECK_THROWS_AS(design_fir(zero, 221, 32000.0), ParameterError);  // odd
  CHECK_THROWS_AS(design_fir(zero, 30, 32000.0), ParameterError);   // short
  CHECK_THROWS_AS(design_fir(zero, 220, 8000.0), ParameterError);   // undersampled
  CHECK_NOTHROW(design_fir(zero, 220, 12000.0));
}

TEST_CASE("taps are exactly symmetric and delay is nfir/2") {
  const auto prescription = make_prescription(flat(50.0));
  REQUIRE(prescription.fir.size() == 221);
  CHECK(prescription.delay == 110);
  for (int d = 0; d <= 110; ++d) {
    CHECK(prescription.fir[static_cast<std::size_t>(110 - d)] ==
          prescription.fir[static_cast<std::size_t>(110 + d)]);
  }
}

TEST_CASE("flat-50 prescription realizes its gains within half a dB") {
  const auto prescription = make_prescription(flat(50.0));
  for (std::size_t j = 0; j < 6; ++j) {
    const double realized = reference_response_db(
        prescription.fir, kAudiogramFrequencies[j], 32000.0);
    CHECK(std::abs(realized - prescription.gains_db[j]) < 0.5);
    // library evaluator agrees with the independent one
    CHECK(fir_response_db(prescription.fir, kAudiogramFrequencies[j],
                          32000.0) == doctest::Approx(realized).epsilon(1e-9));
  }
}

TEST_CASE("response accuracy holds over random audiograms") {
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> level(0.0, 90.0);
  double worst = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    std::array<double, 6> levels;
    for (auto& v : levels) {
      v = level(rng);
    }
    const auto prescription = make_prescription(make_audiogram(levels));
    for (std::size_t j = 0; j < 6; ++j) {
      const double realized = reference_response_db(
          prescription.fir, kAudiogramFrequencies[j], 32000.0);
      worst = std::max(worst, std::abs(realized - prescription.gains_db[j]));
    }
  }
  CHECK(worst < 0.5);
}

TEST_CASE("group delay at catalog frequencies is nfir/2") {
  const auto prescription = make_prescription(flat(50.0));
  const double rate = 32000.0;
  for (const double freq : kAudiogramFrequencies) {
    // tau = -dphi/domega, measured by a symmetric difference.
    const double df = 1.0;
    const auto phase_at = [&](double f) {
      std::complex<double> h(0.0, 0.0);
      for (std::size_t n = 0; n < prescription.fir.size(); ++n) {
        const double ph = -2.0 * std::numbers::pi * f * n / rate;
        h += prescription.fir[n] * std::complex<double>(std::cos(ph),
                                                        std::sin(ph));
      }
      return std::arg(h);
    };
    double dphi = phase_at(freq + df) - phase_at(freq - df);
    while (dphi > std::numbers::pi) dphi -= 2.0 * std::numbers::pi;
    while (dphi < -std::numbers::pi) dphi += 2.0 * std::numbers::pi;
    const double tau = -dphi / (2.0 * std::numbers::pi * 2.0 * df / rate);
    CHECK(std::abs(tau - 110.0) < 0.5);
  }
}

TEST_CASE("amplification is transparent for a flat-0 audiogram") {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  std::vector<double> x(16000);
  for (auto& v : x) {
    v = dist(rng);
  }
  const auto y = apply_amplification(x, flat(0.0));
  REQUIRE(y.size() == x.size());
  double in2 = 0.0;
  double out2 = 0.0;
  for (std::size_t t = 500; t + 500 < x.size(); ++t) {
    in2 += x[t] * x[t];
    out2 += y[t] * y[t];
  }
  // Prescription is ~1 dB at 1 kHz only; broadband RMS stays within 0.1 dB.
  CHECK(std::abs(10.0 * std::log10(out2 / in2)) < 0.1);
}

TEST_CASE("a 1 kHz tone gets the prescribed 24 dB under flat-50") {
  std::vector<double> tone(32000);
  for (std::size_t t = 0; t < tone.size(); ++t) {
    tone[t] = 0.01 * std::sin(2.0 * std::numbers::pi * 1000.0 *
                              static_cast<double>(t) / 32000.0);
  }
  const auto amplified = apply_amplification(tone, flat(50.0));
  double in2 = 0.0;
  double out2 = 0.0;
  for (std::size_t t = 1000; t + 1000 < tone.size(); ++t) {
    in2 += tone[t] * tone[t];
    out2 += amplified[t] * amplified[t];
  }
  const double gain_db = 10.0 * std::log10(out2 / in2);
  CHECK(std::abs(gain_db - 24.0) < 0.5);
}

TEST_CASE("zero signal amplifies to zero, length preserved") {
  const std::vector<double> zeros(1000, 0.0);
  const auto out = apply_amplification(zeros, flat(50.0));
  REQUIRE(out.size() == 1000);
  for (const double v : out) {
    CHECK(v == 0.0);
  }
  const std::vector<double> empty;
  CHECK(apply_amplification(empty, flat(50.0)).empty());
}

TEST_CASE("amplification commutes with time shifts in the interior") {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  std::vector<double> x(8000);
  for (auto& v : x) {
    v = dist(rng);
  }
  const int shift = 250;
  std::vector<double> shifted(x.size(), 0.0);
  for (std::size_t t = shift; t < x.size(); ++t) {
    shifted[t] = x[t - shift];
  }
  const auto prescription = make_prescription(flat(40.0));
  const auto amp_then_shift = apply_amplification(x, prescription);
  const auto shift_then_amp = apply_amplification(shifted, prescription);
  for (std::size_t t = 1000; t + 1000 < x.size(); ++t) {
    CHECK(std::abs(shift_then_amp[t] - amp_then_shift[t - shift]) < 1e-10);
  }
}

TEST_CASE("per-channel amplification pairs ears with channels") {
  // 1 kHz tone: flat-0 prescribes 1 dB there, flat-50 prescribes 24 dB.
  std::vector<double> tone(800);
  for (std::size_t t = 0; t < tone.size(); ++t) {
    tone[t] = 0.1 * std::sin(2.0 * std::numbers::pi * 1000.0 *
                             static_cast<double>(t) / 32000.0);
  }
  const std::vector<std::vector<double>> channels = {tone, tone};
  const std::vector<Audiogram> ears = {flat(0.0), flat(50.0)};
  const auto out = apply_amplification(channels, ears);
  REQUIRE(out.size() == 2);
  double energy0 = 0.0;
  double energy1 = 0.0;
  for (std::size_t t = 250; t < 550; ++t) {
    energy0 += out[0][t] * out[0][t];
    energy1 += out[1][t] * out[1][t];
  }
  // 23 dB of relative gain is an energy ratio near 200.
  CHECK(energy1 > 100.0 * energy0);

  const std::vector<Audiogram> one_ear = {flat(0.0)};
  CHECK_THROWS_AS(apply_amplification(channels, one_ear), ShapeError);
}

TEST_CASE("malformed prescriptions are rejected") {
  NalrPrescription bad;
  bad.fir = {1.0, 2.0};  // even tap count
  bad.delay = 0;
  const std::vector<double> x(10, 0.0);
  CHECK_THROWS_AS(apply_amplification(x, bad), ParameterError);
  bad.fir = {1.0, 2.0, 1.0};
  bad.delay = 5;  // inconsistent with (taps-1)/2
  CHECK_THROWS_AS(apply_amplification(x, bad), ParameterError);
}
