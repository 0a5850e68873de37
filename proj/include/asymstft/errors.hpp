#pragma once

#include <stdexcept>
#include <string>

namespace asymstft {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Mismatched lengths, channel counts, or bin counts.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Operation not valid in the current stream state (out-of-order frames,
/// use after flush).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Overlap-add envelope too close to zero; reconstruction impossible.
class DegenerateWindowError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, written, or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// WAV encoding not supported by the reader.
class UnsupportedFormatError : public IoError {
 public:
  using IoError::IoError;
};

/// Input sample rate differs from the configured rate and resampling was
/// not requested.
class SampleRateError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

}  // namespace asymstft
