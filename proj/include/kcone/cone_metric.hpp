#pragma once

#include "kcone/intersection_tensor.hpp"
#include "kcone/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>

namespace kcone {

/// Derivatives of the potential F = -log Vol up to the requested order.
/// Arrays above the requested order are left empty.
template <typename Scalar>
struct PotentialDerivatives {
  int order = 0;
  Scalar vol{0};
  Vector<Scalar> first;
  Matrix<Scalar> second;
  Array3<Scalar> third;
  Array4<Scalar> fourth;
};

template <typename Scalar>
void require_positive_volume(Scalar vol) {
  if (!(vol > Scalar(0)))
    throw GeometryError(ErrorKind::VolumeNotPositive,
                        "volume " + std::to_string(static_cast<double>(vol)) + " is not positive");
}

/// Exact derivatives of -log Vol from the polynomial derivatives of Vol. With
/// m_I = V_I / Vol these are minus the joint cumulants of the m's.
template <typename Scalar>
PotentialDerivatives<Scalar> potential_derivatives(const IntersectionTensor<Scalar>& c,
                                                   const Vector<Scalar>& t, int order) {
  const auto v = vol_derivatives(c, t, order);
  require_positive_volume(v.value);
  const int N = c.rank();
  const Scalar inv = Scalar(1) / v.value;

  PotentialDerivatives<Scalar> f;
  f.order = order;
  f.vol = v.value;
  const Vector<Scalar> m1 = v.first * inv;
  f.first = -m1;
  if (order < 2) return f;

  const Matrix<Scalar> m2 = v.second * inv;
  f.second = m1 * m1.transpose() - m2;
  if (order < 3) return f;

  Array3<Scalar> m3 = v.third * inv;
  f.third.resize(N, N, N);
  // Evaluated on sorted indices and copied, so the arrays are exactly symmetric.
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j)
      for (int k = j; k < N; ++k)
        f.third(i, j, k) = -(m3(i, j, k) - (m2(i, j) * m1[k] + m2(i, k) * m1[j] + m2(j, k) * m1[i]) +
                             Scalar(2) * m1[i] * m1[j] * m1[k]);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        std::array<int, 3> s{i, j, k};
        std::sort(s.begin(), s.end());
        f.third(i, j, k) = f.third(s[0], s[1], s[2]);
      }
  if (order < 4) return f;

  Array4<Scalar> m4 = v.fourth * inv;
  f.fourth.resize(N, N, N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j)
      for (int k = j; k < N; ++k)
        for (int l = k; l < N; ++l) {
          const Scalar three_one = m3(i, j, k) * m1[l] + m3(i, j, l) * m1[k] + m3(i, k, l) * m1[j] +
                                   m3(j, k, l) * m1[i];
          const Scalar two_two = m2(i, j) * m2(k, l) + m2(i, k) * m2(j, l) + m2(i, l) * m2(j, k);
          const Scalar two_one_one = m2(i, j) * m1[k] * m1[l] + m2(i, k) * m1[j] * m1[l] +
                                     m2(i, l) * m1[j] * m1[k] + m2(j, k) * m1[i] * m1[l] +
                                     m2(j, l) * m1[i] * m1[k] + m2(k, l) * m1[i] * m1[j];
          f.fourth(i, j, k, l) = -(m4(i, j, k, l) - three_one - two_two + Scalar(2) * two_one_one -
                                   Scalar(6) * m1[i] * m1[j] * m1[k] * m1[l]);
        }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          std::array<int, 4> s{i, j, k, l};
          std::sort(s.begin(), s.end());
          f.fourth(i, j, k, l) = f.fourth(s[0], s[1], s[2], s[3]);
        }
  return f;
}

/// Symmetric LDLT with pivot threshold 1e-10 * trace / N.
template <typename Scalar>
bool is_positive_definite(const Matrix<Scalar>& g) {
  const Scalar trace = g.trace();
  if (!(trace > Scalar(0))) return false;
  const Scalar tol = Scalar(1e-10) * trace / Scalar(g.rows());
  Eigen::LDLT<Matrix<Scalar>> ldlt(g);
  if (ldlt.info() != Eigen::Success) return false;
  return (ldlt.vectorD().array() > tol).all();
}

struct Signature {
  int positive = 0;
  int negative = 0;
  int null = 0;

  bool operator==(const Signature&) const = default;
};

/// Eigenvalue sign counts with null threshold rel_tol * max|eigenvalue|.
template <typename Scalar>
Signature signature_of(const Matrix<Scalar>& m, Scalar rel_tol = Scalar(1e-10)) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(m, Eigen::EigenvaluesOnly);
  const Vector<Scalar> lambda = eig.eigenvalues();
  const Scalar threshold = rel_tol * lambda.cwiseAbs().maxCoeff();
  Signature s;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > threshold) ++s.positive;
    else if (lambda[i] < -threshold) ++s.negative;
    else ++s.null;
  }
  return s;
}

template <typename Scalar>
struct MetricAtPoint {
  Matrix<Scalar> g;
  Scalar vol{0};
  /// Gradient of F = -log Vol, i.e. -D log Vol.
  Vector<Scalar> potential_gradient;
};

/// g(u, v) = P1(u) P1(v) / Vol^2 - P2(u, v) / Vol, the Hessian of -log Vol.
template <typename Scalar>
MetricAtPoint<Scalar> metric_at(const IntersectionTensor<Scalar>& c, const ConePoint<Scalar>& point) {
  const auto f = potential_derivatives(c, point.t, 2);
  MetricAtPoint<Scalar> out{f.second, f.vol, f.first};
  if (point.claimed_kahler && !is_positive_definite(out.g))
    throw GeometryError(ErrorKind::NotPositiveDefinite,
                        "metric is not positive-definite at a point claimed to be Kähler");
  return out;
}

/// g(u, v) at t without assembling the full matrix.
template <typename Scalar>
Scalar metric_value(const IntersectionTensor<Scalar>& c, const Vector<Scalar>& t,
                    const Vector<Scalar>& u, const Vector<Scalar>& v) {
  const Scalar vol = volume(c, t);
  require_positive_volume(vol);
  const Scalar pu = contract(c, {u}, t);
  const Scalar pv = contract(c, {v}, t);
  const Scalar puv = c.degree() >= 2 ? contract(c, {u, v}, t) : Scalar(0);
  return pu * pv / (vol * vol) - puv / vol;
}

template <typename Scalar>
struct PrimitiveDecomposition {
  Scalar radial{0};
  Vector<Scalar> primitive;
};

/// u = radial * t + primitive, with P1(primitive; t) = 0.
template <typename Scalar>
PrimitiveDecomposition<Scalar> primitive_decompose(const IntersectionTensor<Scalar>& c,
                                                   const Vector<Scalar>& t, const Vector<Scalar>& u) {
  const Scalar vol = volume(c, t);
  require_positive_volume(vol);
  const Scalar radial = contract(c, {u}, t) / (Scalar(c.degree()) * vol);
  Vector<Scalar> primitive = u - radial * t;
  // A remainder at the rounding level of u (u radial, e.g. always when N = 1)
  // is zero; left in place it would fail the primitivity test on its own scale.
  if (primitive.norm() <= Scalar(16) * std::numeric_limits<Scalar>::epsilon() * u.norm()) primitive.setZero();
  return {radial, primitive};
}

/// |P1(u; t)| <= 1e-8 |u| |t|^(n-1) max|c|
template <typename Scalar>
Scalar primitivity_tolerance(const IntersectionTensor<Scalar>& c, const Vector<Scalar>& t,
                             const Vector<Scalar>& u) {
  using std::pow;
  return Scalar(1e-8) * u.norm() * pow(t.norm(), Scalar(c.degree() - 1)) * c.max_abs_entry();
}

template <typename Scalar>
bool is_primitive(const IntersectionTensor<Scalar>& c, const Vector<Scalar>& t, const Vector<Scalar>& u) {
  using std::abs;
  return abs(contract(c, {u}, t)) <= primitivity_tolerance(c, t, u);
}

/// Restriction of g to the constant-volume level set through t:
/// g_lambda(u, v) = -P2(u, v; t) / Vol(t) for primitive u, v.
template <typename Scalar>
Scalar levelset_metric(const IntersectionTensor<Scalar>& c, const Vector<Scalar>& t,
                       const Vector<Scalar>& u, const Vector<Scalar>& v) {
  const Scalar vol = volume(c, t);
  require_positive_volume(vol);
  if (!is_primitive(c, t, u) || !is_primitive(c, t, v))
    throw GeometryError(ErrorKind::NotPrimitive, "tangent vector is not primitive at the base point");
  if (c.degree() < 2) return Scalar(0);
  return -contract(c, {u, v}, t) / vol;
}

template <typename Scalar>
struct PullbackReport {
  Scalar max_volume_residual{0};
  Scalar max_metric_residual{0};
  Scalar tolerance{0};
  int samples = 0;
  bool pass = false;
};

/// Checks Vol_X(A t) = p Vol_Y(t) and A^T g_X(A t) A = g_Y(t) on sample points
/// of Y. Residuals are relative: to |p Vol_Y| and to max|g_Y| respectively.
template <typename Scalar>
PullbackReport<Scalar> pullback_check(const IntersectionTensor<Scalar>& source,
                                      const IntersectionTensor<Scalar>& target,
                                      const Matrix<Scalar>& map, Scalar degree,
                                      std::span<const Vector<Scalar>> samples,
                                      Scalar tolerance = Scalar(1e-10)) {
  using std::abs;
  if (map.rows() != source.rank() || map.cols() != target.rank())
    throw GeometryError(ErrorKind::ShapeMismatch, "linear map shape does not match tensor ranks");
  if (source.degree() != target.degree())
    throw GeometryError(ErrorKind::ShapeMismatch, "tensors have different degrees");
  if (!(degree > Scalar(0))) throw GeometryError(ErrorKind::InvalidArgument, "degree must be positive");

  PullbackReport<Scalar> report;
  report.tolerance = tolerance;
  for (const auto& t : samples) {
    const auto gy = metric_at(target, volume_point<Scalar>(t));
    const Vector<Scalar> at = map * t;
    const Scalar vx = volume(source, at);
    const Scalar expected = degree * gy.vol;
    report.max_volume_residual = std::max(report.max_volume_residual, Scalar(abs(vx - expected) / abs(expected)));
    if (vx > Scalar(0)) {
      const auto gx = metric_at(source, volume_point<Scalar>(at));
      const Matrix<Scalar> pulled = map.transpose() * gx.g * map;
      report.max_metric_residual = std::max(
          report.max_metric_residual, Scalar((pulled - gy.g).cwiseAbs().maxCoeff() / gy.g.cwiseAbs().maxCoeff()));
    } else {
      report.max_metric_residual = std::numeric_limits<Scalar>::infinity();
    }
    ++report.samples;
  }
  report.pass = report.samples > 0 && report.max_volume_residual < tolerance &&
                report.max_metric_residual < tolerance;
  return report;
}

}  // namespace kcone
