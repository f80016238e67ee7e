#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace kcone {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vectord = Vector<double>;
using Matrixd = Matrix<double>;

/// A point of the cone of classes. Kähler membership cannot be decided from
/// the intersection tensor alone, so the caller asserts it; operations then
/// check the necessary conditions (positive volume, positive-definite metric).
template <typename Scalar>
struct ConePoint {
  Vector<Scalar> t;
  bool claimed_kahler = false;
};

template <typename Scalar>
ConePoint<Scalar> kahler_point(Vector<Scalar> t) {
  return {std::move(t), true};
}

template <typename Scalar>
ConePoint<Scalar> volume_point(Vector<Scalar> t) {
  return {std::move(t), false};
}

enum class ErrorKind {
  DimensionMismatch,
  InvalidArgument,
  InvalidTensor,
  VolumeNotPositive,
  NotPositiveDefinite,
  NotPrimitive,
  SingularMetric,
  DegeneratePlane,
  WrongSignature,
  ShapeMismatch,
  NoValidPoints,
  ParseError,
};

constexpr const char* error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidTensor: return "InvalidTensor";
    case ErrorKind::VolumeNotPositive: return "VolumeNotPositive";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotPrimitive: return "NotPrimitive";
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::DegeneratePlane: return "DegeneratePlane";
    case ErrorKind::WrongSignature: return "WrongSignature";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NoValidPoints: return "NoValidPoints";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Domain error carrying a machine-readable kind.
class GeometryError : public std::runtime_error {
 public:
  GeometryError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  const char* name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace kcone
