#pragma once

#include <complex>
#include <span>

namespace asymstft {

/// Real-input DFT of a fixed even size, backed by FFTW. The forward
/// transform is unnormalized; the inverse carries the 1/size factor so
/// forward followed by inverse is the identity.
///
/// An instance owns its plans and scratch buffers and is not safe for
/// concurrent use; distinct instances may run in parallel.
class RealDft {
 public:
  explicit RealDft(int size);
  ~RealDft();

  RealDft(const RealDft&) = delete;
  RealDft& operator=(const RealDft&) = delete;
  RealDft(RealDft&& other) noexcept;
  RealDft& operator=(RealDft&& other) noexcept;

  int size() const noexcept { return size_; }
  int bins() const noexcept { return size_ / 2 + 1; }

  /// in: size() samples; out: bins() complex values.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);

  /// in: bins() complex values; out: size() samples. The imaginary parts
  /// of the DC and Nyquist bins are ignored (real-signal convention).
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  void destroy() noexcept;

  int size_ = 0;
  void* plan_forward_ = nullptr;
  void* plan_inverse_ = nullptr;
  double* real_buf_ = nullptr;
  void* complex_buf_ = nullptr;
};

}  // namespace asymstft
