#include "asymstft/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <string>

#include "asymstft/errors.hpp"

namespace asymstft {

namespace {

// FFTW planning touches shared internal state; execution is thread-safe but
// plan creation/destruction must be serialized.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealDft::RealDft(int size) : size_(size) {
  if (size <= 0 || size % 2 != 0) {
    throw ParameterError("transform size must be positive and even, got " +
                         std::to_string(size));
  }
  real_buf_ = fftw_alloc_real(static_cast<std::size_t>(size));
  complex_buf_ = fftw_alloc_complex(static_cast<std::size_t>(size / 2 + 1));
  if (real_buf_ == nullptr || complex_buf_ == nullptr) {
    fftw_free(real_buf_);
    fftw_free(complex_buf_);
    throw Error("failed to allocate transform buffers");
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_forward_ = fftw_plan_dft_r2c_1d(
        size_, real_buf_, static_cast<fftw_complex*>(complex_buf_),
        FFTW_ESTIMATE);
    plan_inverse_ = fftw_plan_dft_c2r_1d(
        size_, static_cast<fftw_complex*>(complex_buf_), real_buf_,
        FFTW_ESTIMATE);
  }
  if (plan_forward_ == nullptr || plan_inverse_ == nullptr) {
    destroy();
    throw Error("failed to create transform plans for size " +
                std::to_string(size));
  }
}

RealDft::~RealDft() { destroy(); }

RealDft::RealDft(RealDft&& other) noexcept
    : size_(other.size_),
      plan_forward_(other.plan_forward_),
      plan_inverse_(other.plan_inverse_),
      real_buf_(other.real_buf_),
      complex_buf_(other.complex_buf_) {
  other.size_ = 0;
  other.plan_forward_ = nullptr;
  other.plan_inverse_ = nullptr;
  other.real_buf_ = nullptr;
  other.complex_buf_ = nullptr;
}

RealDft& RealDft::operator=(RealDft&& other) noexcept {
  if (this != &other) {
    destroy();
    size_ = other.size_;
    plan_forward_ = other.plan_forward_;
    plan_inverse_ = other.plan_inverse_;
    real_buf_ = other.real_buf_;
    complex_buf_ = other.complex_buf_;
    other.size_ = 0;
    other.plan_forward_ = nullptr;
    other.plan_inverse_ = nullptr;
    other.real_buf_ = nullptr;
    other.complex_buf_ = nullptr;
  }
  return *this;
}

void RealDft::destroy() noexcept {
  if (plan_forward_ != nullptr || plan_inverse_ != nullptr) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_forward_ != nullptr) {
      fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    }
    if (plan_inverse_ != nullptr) {
      fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
    }
  }
  plan_forward_ = nullptr;
  plan_inverse_ = nullptr;
  fftw_free(real_buf_);
  fftw_free(complex_buf_);
  real_buf_ = nullptr;
  complex_buf_ = nullptr;
}

void RealDft::forward(std::span<const double> input,
                      std::span<std::complex<double>> output) {
  if (static_cast<int>(input.size()) != size_) {
    throw ShapeError("forward transform expects " + std::to_string(size_) +
                     " samples, got " + std::to_string(input.size()));
  }
  if (static_cast<int>(output.size()) != bins()) {
    throw ShapeError("forward transform expects " + std::to_string(bins()) +
                     " output bins, got " + std::to_string(output.size()));
  }
  std::copy(input.begin(), input.end(), real_buf_);
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  const auto* cbuf = static_cast<const fftw_complex*>(complex_buf_);
  for (int k = 0; k < bins(); ++k) {
    output[k] = std::complex<double>(cbuf[k][0], cbuf[k][1]);
  }
}

void RealDft::inverse(std::span<const std::complex<double>> input,
                      std::span<double> output) {
  if (static_cast<int>(input.size()) != bins()) {
    throw ShapeError("inverse transform expects " + std::to_string(bins()) +
                     " bins, got " + std::to_string(input.size()));
  }
  if (static_cast<int>(output.size()) != size_) {
    throw ShapeError("inverse transform expects " + std::to_string(size_) +
                     " output samples, got " + std::to_string(output.size()));
  }
  auto* cbuf = static_cast<fftw_complex*>(complex_buf_);
  for (int k = 0; k < bins(); ++k) {
    cbuf[k][0] = input[k].real();
    cbuf[k][1] = input[k].imag();
  }
  // A real signal has real DC and Nyquist bins; drop any stray imaginary part
  // rather than letting c2r fold it into the output.
  cbuf[0][1] = 0.0;
  cbuf[bins() - 1][1] = 0.0;
  fftw_execute(static_cast<fftw_plan>(plan_inverse_));
  const double scale = 1.0 / static_cast<double>(size_);
  for (int n = 0; n < size_; ++n) {
    output[n] = real_buf_[n] * scale;
  }
}

}  // namespace asymstft
