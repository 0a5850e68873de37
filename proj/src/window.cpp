#include "asymstft/window.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "asymstft/errors.hpp"

namespace asymstft {

namespace {

constexpr double kPi = std::numbers::pi;

double eval_analysis(int n, const WindowParams& p) {
  if (n < p.n1) {
    const double s = std::sin(kPi * n / (2.0 * p.n1));
    return s * s;
  }
  if (n <= p.n2) {
    return 1.0;
  }
  const double denom = (p.tail == TailVariant::kVerbatim) ? 4.0 * p.hop
                                                          : 2.0 * p.hop;
  return std::sin(kPi * (p.n2 + p.hop - n) / denom);
}

double eval_synthesis(int n, const WindowParams& p) {
  if (n < p.n2 - p.hop) {
    return 0.0;
  }
  if (n <= p.n2) {
    const double c = std::cos(kPi * (n - p.n2) / (2.0 * p.hop));
    return c * c;
  }
  return std::sin(kPi * (p.n2 + p.hop - n) / (2.0 * p.hop));
}

void check_pair_shape(const WindowPair& pair) {
  pair.params.validate();
  const auto length = static_cast<std::size_t>(pair.params.length());
  if (pair.analysis.size() != length || pair.synthesis.size() != length) {
    throw ShapeError("window pair length " +
                     std::to_string(pair.analysis.size()) + "/" +
                     std::to_string(pair.synthesis.size()) +
                     " does not match n2 + hop = " + std::to_string(length));
  }
}

}  // namespace

void WindowParams::validate() const {
  if (hop <= 0) {
    throw ParameterError("hop must be positive, got " + std::to_string(hop));
  }
  if (n1 <= 0) {
    throw ParameterError("n1 must be positive, got " + std::to_string(n1));
  }
  if (n1 >= n2 - hop) {
    throw ParameterError("constraint 0 < n1 < n2 - hop violated: n1 = " +
                         std::to_string(n1) + ", n2 - hop = " +
                         std::to_string(n2 - hop));
  }
  if (length() % 2 != 0) {
    throw ParameterError("window length n2 + hop must be even, got " +
                         std::to_string(length()));
  }
  if (!(sample_rate > 0.0)) {
    throw ParameterError("sample_rate must be positive");
  }
}

WindowPair make_window_pair(const WindowParams& params) {
  params.validate();
  WindowPair pair;
  pair.params = params;
  const int length = params.length();
  pair.analysis.resize(length);
  pair.synthesis.resize(length);
  for (int n = 0; n < length; ++n) {
    pair.analysis[n] = eval_analysis(n, params);
    pair.synthesis[n] = eval_synthesis(n, params);
  }
  return pair;
}

std::vector<double> cola_envelope(const WindowPair& pair) {
  check_pair_shape(pair);
  const int length = pair.params.length();
  const int hop = pair.params.hop;
  std::vector<double> envelope(hop, 0.0);
  for (int s = 0; s < hop; ++s) {
    double acc = 0.0;
    for (int n = s; n < length; n += hop) {
      acc += pair.analysis[n] * pair.synthesis[n];
    }
    envelope[s] = acc;
  }
  return envelope;
}

WindowPair normalize_synthesis(const WindowPair& pair) {
  const std::vector<double> envelope = cola_envelope(pair);
  for (int s = 0; s < static_cast<int>(envelope.size()); ++s) {
    if (std::abs(envelope[s]) < kEnvelopeFloor) {
      throw DegenerateWindowError(
          "overlap-add envelope is " + std::to_string(envelope[s]) +
          " at phase " + std::to_string(s) +
          "; reconstruction impossible at that phase");
    }
  }
  WindowPair out = pair;
  const int hop = pair.params.hop;
  for (int n = 0; n < pair.params.length(); ++n) {
    out.synthesis[n] = pair.synthesis[n] / envelope[n % hop];
  }
  out.normalized = true;
  return out;
}

}  // namespace asymstft
