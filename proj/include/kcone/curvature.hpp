#pragma once

#include "kcone/cone_metric.hpp"
#include "kcone/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace kcone {

/// Levi-Civita data of the Hessian metric at a point, in the flat coordinates
/// of the ambient vector space.
///
/// Index conventions:
///   christoffel_first(k, i, j)  = Gamma_{k,ij} = g(nabla_i e_j, e_k) = F_kij / 2
///   christoffel_second(l, i, j) = Gamma^l_ij
///   riemann(a, b, c, d)         = R(e_a, e_b, e_c, e_d) = g(R(e_c, e_d) e_a, e_b)
/// with R(x, y) z = nabla_x nabla_y z - nabla_y nabla_x z - nabla_[x,y] z, so that
/// R(u, v, v, u) over the Gram determinant is the sectional curvature.
template <typename Scalar>
struct CurvatureAtPoint {
  ConePoint<Scalar> base;
  Matrix<Scalar> metric;
  Matrix<Scalar> inverse_metric;
  /// max |eigenvalue| / min |eigenvalue| of the metric
  Scalar condition{0};
  Array3<Scalar> christoffel_first;
  Array3<Scalar> christoffel_second;
  /// Empty unless produced by riemann_at.
  Array4<Scalar> riemann;

  bool has_riemann() const noexcept { return riemann.size() > 0; }
};

inline constexpr double kSingularConditionLimit = 1e12;

namespace detail {

template <typename Scalar>
CurvatureAtPoint<Scalar> connection_from_potential(const ConePoint<Scalar>& point,
                                                   const PotentialDerivatives<Scalar>& f) {
  using std::abs;
  const int N = static_cast<int>(point.t.size());
  CurvatureAtPoint<Scalar> out;
  out.base = point;
  out.metric = f.second;
  if (point.claimed_kahler && !is_positive_definite(out.metric))
    throw GeometryError(ErrorKind::NotPositiveDefinite,
                        "metric is not positive-definite at a point claimed to be Kähler");

  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(out.metric);
  if (eig.info() != Eigen::Success)
    throw GeometryError(ErrorKind::SingularMetric, "eigendecomposition of the metric failed");
  const Vector<Scalar> lambda = eig.eigenvalues();
  const Scalar largest = lambda.cwiseAbs().maxCoeff();
  const Scalar smallest = lambda.cwiseAbs().minCoeff();
  out.condition = smallest > Scalar(0) ? largest / smallest : Scalar(INFINITY);
  if (!(out.condition <= Scalar(kSingularConditionLimit)))
    throw GeometryError(ErrorKind::SingularMetric,
                        "metric condition estimate " + std::to_string(static_cast<double>(out.condition)) +
                            " exceeds 1e12");
  out.inverse_metric =
      eig.eigenvectors() * lambda.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();

  out.christoffel_first.resize(N, N, N);
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) out.christoffel_first(k, i, j) = Scalar(0.5) * f.third(k, i, j);

  out.christoffel_second.resize(N, N, N);
  out.christoffel_second.setZero();
  for (int l = 0; l < N; ++l)
    for (int k = 0; k < N; ++k) {
      const Scalar ginv = out.inverse_metric(l, k);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) out.christoffel_second(l, i, j) += ginv * out.christoffel_first(k, i, j);
    }
  return out;
}

}  // namespace detail

template <typename Scalar>
CurvatureAtPoint<Scalar> christoffel_at(const IntersectionTensor<Scalar>& c, const ConePoint<Scalar>& point) {
  return detail::connection_from_potential(point, potential_derivatives(c, point.t, 3));
}

/// Riemann tensor from the coordinate formula
///   R(e_i, e_j) e_k = (d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik) e_l
/// where d_i G^l_jk = -2 G^l_bi G^b_jk + g^lm F_mjki / 2 uses exact fourth
/// derivatives of the potential.
template <typename Scalar>
CurvatureAtPoint<Scalar> riemann_at(const IntersectionTensor<Scalar>& c, const ConePoint<Scalar>& point) {
  const auto f = potential_derivatives(c, point.t, 4);
  auto out = detail::connection_from_potential(point, f);
  const int N = c.rank();
  const auto& gam = out.christoffel_second;

  // d_gamma(i, l, j, k) = d_i Gamma^l_jk
  Array4<Scalar> d_gamma(N, N, N, N);
  for (int i = 0; i < N; ++i)
    for (int l = 0; l < N; ++l)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
          Scalar s(0);
          for (int b = 0; b < N; ++b)
            s += Scalar(-2) * gam(l, b, i) * gam(b, j, k) +
                 Scalar(0.5) * out.inverse_metric(l, b) * f.fourth(b, j, k, i);
          d_gamma(i, l, j, k) = s;
        }

  // q(l, i, j, k) = R^l_ijk, the e_l component of R(e_i, e_j) e_k
  Array4<Scalar> q(N, N, N, N);
  for (int l = 0; l < N; ++l)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
          Scalar s = d_gamma(i, l, j, k) - d_gamma(j, l, i, k);
          for (int m = 0; m < N; ++m) s += gam(l, i, m) * gam(m, j, k) - gam(l, j, m) * gam(m, i, k);
          q(l, i, j, k) = s;
        }

  out.riemann.resize(N, N, N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int cc = 0; cc < N; ++cc)
        for (int d = 0; d < N; ++d) {
          Scalar s(0);
          for (int l = 0; l < N; ++l) s += out.metric(b, l) * q(l, cc, d, a);
          out.riemann(a, b, cc, d) = s;
        }
  return out;
}

/// R(u, v, z, w) contracted from the stored covariant tensor.
template <typename Scalar>
Scalar riemann_form(const CurvatureAtPoint<Scalar>& curv, const Vector<Scalar>& u, const Vector<Scalar>& v,
                    const Vector<Scalar>& z, const Vector<Scalar>& w) {
  if (!curv.has_riemann())
    throw GeometryError(ErrorKind::InvalidArgument, "curvature data has no Riemann tensor");
  const int N = static_cast<int>(curv.metric.rows());
  Scalar s(0);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      const Scalar uv = u[a] * v[b];
      if (uv == Scalar(0)) continue;
      for (int cc = 0; cc < N; ++cc)
        for (int d = 0; d < N; ++d) s += curv.riemann(a, b, cc, d) * uv * z[cc] * w[d];
    }
  return s;
}

/// K(u, v) = R(u, v, v, u) / (g(u,u) g(v,v) - g(u,v)^2)
template <typename Scalar>
Scalar sectional(const CurvatureAtPoint<Scalar>& curv, const Vector<Scalar>& u, const Vector<Scalar>& v) {
  using std::abs;
  const int N = static_cast<int>(curv.metric.rows());
  if (u.size() != N || v.size() != N)
    throw GeometryError(ErrorKind::DimensionMismatch, "tangent vectors do not match the tensor rank");
  const Scalar guu = u.dot(curv.metric * u);
  const Scalar gvv = v.dot(curv.metric * v);
  const Scalar guv = u.dot(curv.metric * v);
  const Scalar gram = guu * gvv - guv * guv;
  if (!(abs(gram) > Scalar(1e-12) * abs(guu * gvv)))
    throw GeometryError(ErrorKind::DegeneratePlane, "vectors do not span a 2-plane");
  return riemann_form(curv, u, v, v, u) / gram;
}

template <typename Scalar>
Scalar sectional(const IntersectionTensor<Scalar>& c, const ConePoint<Scalar>& point, const Vector<Scalar>& u,
                 const Vector<Scalar>& v) {
  return sectional(riemann_at(c, point), u, v);
}

}  // namespace kcone
