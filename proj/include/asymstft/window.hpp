#pragma once

#include <vector>

namespace asymstft {

/// Shape of the analysis-window tail above n = N2.
///
/// The pair is built from a long forward (analysis) window and a short
/// backward (synthesis) window whose support is the final 2R samples.
/// Two tail shapes are provided for the analysis window:
///
///  - kVerbatim:   sin(pi*(N2+R-n)/(4R)). Discontinuous at n = N2 (drops
///                 from 1 to sin(pi/4)) and the overlap-add envelope of
///                 the pair is not constant; synthesis normalization is
///                 required for perfect reconstruction.
///  - kContinuous: sin(pi*(N2+R-n)/(2R)). Continuous at n = N2 and the
///                 pair is exactly constant-overlap-add as generated.
///
/// kContinuous is the library default.
enum class TailVariant {
  kVerbatim,
  kContinuous,
};

/// Parameters of one asymmetric window pair. The window length is
/// L = n2 + hop samples; indices run 0..L-1.
struct WindowParams {
  int n1 = 64;
  int n2 = 448;
  int hop = 64;
  double sample_rate = 32000.0;
  TailVariant tail = TailVariant::kContinuous;

  int length() const noexcept { return n2 + hop; }

  /// Throws ParameterError naming the violated constraint. Requires
  /// hop > 0, 0 < n1 < n2 - hop, even window length, and a positive
  /// sample rate.
  void validate() const;
};

/// An analysis/synthesis window pair of equal length n2 + hop.
/// Before normalization all values lie in [0, 1] and the synthesis
/// window is zero below index n2 - hop.
struct WindowPair {
  std::vector<double> analysis;   // w1
  std::vector<double> synthesis;  // w2
  WindowParams params;
  bool normalized = false;
};

/// Envelope entries below this floor make normalization impossible.
inline constexpr double kEnvelopeFloor = 1e-6;

/// Evaluates the window pair at integer n in [0, L). Deterministic; all
/// trigonometric evaluation in double precision.
WindowPair make_window_pair(const WindowParams& params);

/// Steady-state overlap-add envelope of the product window w1*w2 at hop
/// R, one entry per phase offset s in [0, hop). Exactly two product
/// terms contribute per phase because the synthesis support is 2R.
std::vector<double> cola_envelope(const WindowPair& pair);

/// Divides the synthesis window by the envelope at its phase so that
/// cola_envelope of the result is all-ones. Throws DegenerateWindowError
/// if any envelope entry is below kEnvelopeFloor. Idempotent.
WindowPair normalize_synthesis(const WindowPair& pair);

}  // namespace asymstft
