#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>

namespace grpheat {

using Scalar = double;

template <typename T>
using VectorT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Row-major so that one row is one time level of a space-time field.
template <typename T>
using MatrixT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Vector = VectorT<Scalar>;
using Matrix = MatrixT<Scalar>;

inline constexpr Scalar kPi = std::numbers::pi_v<Scalar>;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or precondition violation.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or configuration text.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input carrying unusable values (non-finite, nonpositive, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (singular system, no convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Result not representable in double precision.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Grid too coarse for the requested estimate.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

}  // namespace grpheat
