#include "asymstft/resample.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "asymstft/errors.hpp"

using namespace asymstft;

namespace {

std::vector<double> tone(double freq_hz, double rate, std::size_t length) {
  std::vector<double> x(length);
  for (std::size_t t = 0; t < length; ++t) {
    x[t] = std::sin(2.0 * std::numbers::pi * freq_hz *
                    static_cast<double>(t) / rate);
  }
  return x;
}

// SNR of a resampled tone against the ideal tone at the new rate, skipping
// the filter transient at both ends.
double tone_snr_db(double freq_hz, double rate_in, double rate_out,
                   std::size_t length) {
  const auto x = tone(freq_hz, rate_in, length);
  const auto y = resample(x, rate_in, rate_out);
  const std::size_t skip = 256;
  double sig = 0.0;
  double err = 0.0;
  for (std::size_t t = skip; t + skip < y.size(); ++t) {
    const double ideal = std::sin(2.0 * std::numbers::pi * freq_hz *
                                  static_cast<double>(t) / rate_out);
    sig += ideal * ideal;
    err += (y[t] - ideal) * (y[t] - ideal);
  }
  return 10.0 * std::log10(sig / err);
}

}  // namespace

TEST_CASE("unity ratio returns an exact copy") {
  const auto x = tone(1000.0, 32000.0, 500);
  const auto y = resample(x, 32000.0, 32000.0);
  CHECK(y == x);
}

TEST_CASE("output length is floor(len * up / down)") {
  const auto x = std::vector<double>(44100, 0.0);
  CHECK(resample(x, 44100.0, 32000.0).size() == 32000);
  CHECK(resample(x, 32000.0, 44100.0).size() == 60775);  // floor(44100*441/320)
  const auto y = std::vector<double>(1001, 0.0);
  CHECK(resample(y, 48000.0, 32000.0).size() == 667);  // floor(1001*2/3)
}

TEST_CASE("tone survives common rate conversions") {
  // A 64-tap-per-phase Blackman sinc holds midband tones above 100 dB.
  CHECK(tone_snr_db(1000.0, 44100.0, 32000.0, 44100) > 120.0);
  CHECK(tone_snr_db(1000.0, 32000.0, 44100.0, 32000) > 100.0);
  CHECK(tone_snr_db(2500.0, 48000.0, 32000.0, 48000) > 100.0);
}

TEST_CASE("DC passes through at unit gain") {
  const std::vector<double> x(8000, 1.0);
  const auto y = resample(x, 48000.0, 32000.0);
  for (std::size_t t = 256; t + 256 < y.size(); ++t) {
    CHECK(y[t] == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("empty input yields empty output") {
  CHECK(resample({}, 44100.0, 32000.0).empty());
}

TEST_CASE("parameter validation") {
  const std::vector<double> x(100, 0.0);
  CHECK_THROWS_AS(resample(x, 0.0, 32000.0), ParameterError);
  CHECK_THROWS_AS(resample(x, 32000.0, -1.0), ParameterError);
  CHECK_THROWS_AS(resample(x, 32000.0, 44100.0, 4), ParameterError);
}
