#include "asymstft/window.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "asymstft/errors.hpp"

using namespace asymstft;

namespace {

constexpr double kPi = std::numbers::pi;

WindowParams params_of(int n1, int n2, int hop, TailVariant tail) {
  WindowParams p;
  p.n1 = n1;
  p.n2 = n2;
  p.hop = hop;
  p.tail = tail;
  return p;
}

}  // namespace

TEST_CASE("default parameters describe a 512-sample pair") {
  WindowParams p;
  CHECK(p.n1 == 64);
  CHECK(p.n2 == 448);
  CHECK(p.hop == 64);
  CHECK(p.length() == 512);
  const auto pair = make_window_pair(p);
  CHECK(pair.analysis.size() == 512);
  CHECK(pair.synthesis.size() == 512);
  CHECK_FALSE(pair.normalized);
}

TEST_CASE("analysis window boundary values") {
  for (const auto tail : {TailVariant::kContinuous, TailVariant::kVerbatim}) {
    const auto pair = make_window_pair(params_of(64, 448, 64, tail));
    const auto& w1 = pair.analysis;
    CHECK(w1[0] == 0.0);
    CHECK(w1[64] == 1.0);   // start of the flat segment
    CHECK(w1[448] == 1.0);  // end of the flat segment
    CHECK(w1[32] == doctest::Approx(0.5).epsilon(1e-15));  // sin^2 midpoint
    // Tail start just after n2, and the final kept sample (the n2+hop
    // endpoint is dropped because indices stop at length-1).
    const double denom = tail == TailVariant::kVerbatim ? 4.0 * 64 : 2.0 * 64;
    CHECK(w1[449] == doctest::Approx(std::sin(kPi * 63.0 / denom)).epsilon(1e-15));
    CHECK(w1[511] == doctest::Approx(std::sin(kPi * 1.0 / denom)).epsilon(1e-15));
  }
}

TEST_CASE("synthesis window boundary values") {
  const auto pair = make_window_pair(params_of(64, 448, 64, TailVariant::kContinuous));
  const auto& w2 = pair.synthesis;
  CHECK(w2[0] == 0.0);
  CHECK(w2[383] == 0.0);  // zero before n2 - hop
  CHECK(w2[384] == doctest::Approx(0.0).epsilon(1e-30));  // cos^2(-pi/2)
  CHECK(w2[448] == 1.0);                                  // cos^2(0)
  CHECK(w2[416] == doctest::Approx(0.5).epsilon(1e-15));  // cos^2 midpoint
  CHECK(w2[480] ==
        doctest::Approx(std::sin(kPi * 32.0 / 128.0)).epsilon(1e-15));
  CHECK(w2[511] == doctest::Approx(std::sin(kPi / 128.0)).epsilon(1e-15));
}

TEST_CASE("tail variants differ only past n2") {
  const auto verbatim = make_window_pair(params_of(64, 448, 64, TailVariant::kVerbatim));
  const auto continuous = make_window_pair(params_of(64, 448, 64, TailVariant::kContinuous));
  for (int n = 0; n <= 448; ++n) {
    CHECK(verbatim.analysis[n] == continuous.analysis[n]);
  }
  // Verbatim tail starts near sin(pi/4) ~ 0.707; continuous near 1.
  CHECK(verbatim.analysis[449] < 0.71);
  CHECK(continuous.analysis[449] > 0.99);
  // Synthesis window is identical for both variants.
  for (int n = 0; n < 512; ++n) {
    CHECK(verbatim.synthesis[n] == continuous.synthesis[n]);
  }
}

TEST_CASE("parameter validation names the violated constraint") {
  CHECK_THROWS_AS(make_window_pair(params_of(64, 448, 0, TailVariant::kContinuous)),
                  ParameterError);
  CHECK_THROWS_AS(make_window_pair(params_of(0, 448, 64, TailVariant::kContinuous)),
                  ParameterError);
  CHECK_THROWS_AS(make_window_pair(params_of(-4, 448, 64, TailVariant::kContinuous)),
                  ParameterError);
  // n1 >= n2 - hop
  CHECK_THROWS_AS(make_window_pair(params_of(200, 210, 64, TailVariant::kContinuous)),
                  ParameterError);
  CHECK_THROWS_AS(make_window_pair(params_of(384, 448, 64, TailVariant::kContinuous)),
                  ParameterError);
  // odd length
  CHECK_THROWS_AS(make_window_pair(params_of(64, 447, 64, TailVariant::kContinuous)),
                  ParameterError);
  WindowParams bad_rate;
  bad_rate.sample_rate = 0.0;
  CHECK_THROWS_AS(make_window_pair(bad_rate), ParameterError);

  try {
    make_window_pair(params_of(200, 210, 64, TailVariant::kContinuous));
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("n1") != std::string::npos);
  }
}

TEST_CASE("continuous variant sums to one at every phase") {
  const std::vector<std::array<int, 3>> sweep = {
      {64, 448, 64}, {32, 200, 24}, {16, 112, 16}, {8, 56, 8},
      {100, 400, 100}, {10, 80, 22}, {48, 300, 52}, {5, 31, 9},
      {64, 448, 32}, {20, 500, 12}, {2, 10, 4}};
  for (const auto& [n1, n2, hop] : sweep) {
    CAPTURE(n1);
    CAPTURE(n2);
    CAPTURE(hop);
    const auto pair = make_window_pair(params_of(n1, n2, hop, TailVariant::kContinuous));
    for (const double e : cola_envelope(pair)) {
      CHECK(std::abs(e - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("verbatim variant envelope at defaults") {
  const auto pair = make_window_pair(params_of(64, 448, 64, TailVariant::kVerbatim));
  const auto envelope = cola_envelope(pair);
  REQUIRE(envelope.size() == 64);
  // Mid-phase value has a closed form: 0.5 + sin(pi/8)*sin(pi/4).
  CHECK(envelope[32] == doctest::Approx(0.7705980500730986).epsilon(1e-14));
  CHECK(envelope[32] ==
        doctest::Approx(0.5 + std::sin(kPi / 8) * std::sin(kPi / 4)).epsilon(1e-15));
  double min_value = 2.0;
  int argmin = -1;
  double max_dev = 0.0;
  for (int s = 0; s < 64; ++s) {
    if (envelope[s] < min_value) {
      min_value = envelope[s];
      argmin = s;
    }
    max_dev = std::max(max_dev, std::abs(envelope[s] - 1.0));
  }
  CHECK(argmin == 12);
  CHECK(min_value == doctest::Approx(0.6543138862851599).epsilon(1e-14));
  CHECK(max_dev == doctest::Approx(0.34568611371484015).epsilon(1e-14));
}

TEST_CASE("normalization makes every phase sum to one") {
  for (const auto tail : {TailVariant::kVerbatim, TailVariant::kContinuous}) {
    const auto pair = make_window_pair(params_of(64, 448, 64, tail));
    const auto normalized = normalize_synthesis(pair);
    CHECK(normalized.normalized);
    CHECK(normalized.params.length() == pair.params.length());
    for (const double e : cola_envelope(normalized)) {
      CHECK(std::abs(e - 1.0) < 1e-12);
    }
    // Analysis window untouched.
    for (int n = 0; n < 512; ++n) {
      CHECK(normalized.analysis[n] == pair.analysis[n]);
    }
  }
}

TEST_CASE("degenerate pair is rejected with its own error type") {
  auto pair = make_window_pair(WindowParams{});
  for (auto& v : pair.synthesis) {
    v = 0.0;  // force an all-zero overlap-add envelope
  }
  CHECK_THROWS_AS(normalize_synthesis(pair), DegenerateWindowError);
  // DegenerateWindowError is not a ParameterError; it gets its own exit class.
  CHECK_THROWS_AS(normalize_synthesis(pair), Error);
}

TEST_CASE("tampered vector lengths are a shape error") {
  auto pair = make_window_pair(WindowParams{});
  pair.analysis.pop_back();
  CHECK_THROWS_AS(cola_envelope(pair), ShapeError);
  CHECK_THROWS_AS(normalize_synthesis(pair), ShapeError);
}
