#pragma once

#include "kcone/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>

// Trace metric on Hermitian positive-definite matrices: the Kähler-cone metric
// of a complex torus, and a finite model of the space of Hermitian metrics in
// which the connection and curvature formulas are exact matrix identities.

namespace kcone::maass {

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
bool is_hermitian(const ComplexMatrix<Scalar>& a, Scalar tol = Scalar(1e-12)) {
  if (a.rows() != a.cols()) return false;
  const Scalar scale = std::max(Scalar(1), a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// Hermitian positive-definite base point with its cached inverse.
template <typename Scalar>
class HermitianPoint {
 public:
  explicit HermitianPoint(ComplexMatrix<Scalar> omega) : omega_(std::move(omega)) {
    if (!is_hermitian(omega_))
      throw GeometryError(ErrorKind::InvalidArgument, "base point is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> eig(omega_);
    if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > Scalar(0)))
      throw GeometryError(ErrorKind::NotPositiveDefinite, "base point is not positive-definite");
    inverse_ = omega_.llt().solve(ComplexMatrix<Scalar>::Identity(dim(), dim()));
  }

  int dim() const noexcept { return static_cast<int>(omega_.rows()); }
  const ComplexMatrix<Scalar>& omega() const noexcept { return omega_; }
  const ComplexMatrix<Scalar>& inverse() const noexcept { return inverse_; }

 private:
  ComplexMatrix<Scalar> omega_;
  ComplexMatrix<Scalar> inverse_;
};

namespace detail {

template <typename Scalar>
void check_shape(const HermitianPoint<Scalar>& p, const ComplexMatrix<Scalar>& a) {
  if (a.rows() != p.dim() || a.cols() != p.dim())
    throw GeometryError(ErrorKind::DimensionMismatch, "tangent matrix does not match the base point");
}

}  // namespace detail

/// Re tr(Omega^-1 A Omega^-1 B^*). On Hermitian pairs this is tr(Omega^-1 A Omega^-1 B);
/// the conjugate transpose makes it positive on anti-Hermitian bracket values too.
template <typename Scalar>
Scalar inner(const HermitianPoint<Scalar>& p, const ComplexMatrix<Scalar>& a, const ComplexMatrix<Scalar>& b) {
  detail::check_shape(p, a);
  detail::check_shape(p, b);
  const auto& inv = p.inverse();
  return (inv * a * inv * b.adjoint()).trace().real();
}

/// {Z, W} = Z Omega^-1 W - W Omega^-1 Z
template <typename Scalar>
ComplexMatrix<Scalar> bracket(const HermitianPoint<Scalar>& p, const ComplexMatrix<Scalar>& z,
                              const ComplexMatrix<Scalar>& w) {
  detail::check_shape(p, z);
  detail::check_shape(p, w);
  const auto& inv = p.inverse();
  return z * inv * w - w * inv * z;
}

/// S(Z, U) = -(Z Omega^-1 U + U Omega^-1 Z) / 2, the connection applied to
/// constant fields.
template <typename Scalar>
ComplexMatrix<Scalar> connection(const HermitianPoint<Scalar>& p, const ComplexMatrix<Scalar>& z,
                                 const ComplexMatrix<Scalar>& u) {
  detail::check_shape(p, z);
  detail::check_shape(p, u);
  const auto& inv = p.inverse();
  return Scalar(-0.5) * (z * inv * u + u * inv * z);
}

/// T(Z) = (tr_Omega Z - G(Z, Omega)) / 2. The pointwise trace is its own
/// average in the matrix model, so this vanishes identically.
template <typename Scalar>
Scalar trace_term(const HermitianPoint<Scalar>& p, const ComplexMatrix<Scalar>& z) {
  detail::check_shape(p, z);
  const Scalar pointwise = (p.inverse() * z).trace().real();
  return Scalar(0.5) * (pointwise - inner(p, z, p.omega()));
}

/// T(Z) U + S(Z, U)
template <typename Scalar>
ComplexMatrix<Scalar> levi_civita(const HermitianPoint<Scalar>& p, const ComplexMatrix<Scalar>& z,
                                  const ComplexMatrix<Scalar>& u) {
  return trace_term(p, z) * u + connection(p, z, u);
}

/// Directional derivative of G(U, V) along Z for constant U, V, using
/// D_Z Omega^-1 = -Omega^-1 Z Omega^-1.
template <typename Scalar>
Scalar inner_derivative(const HermitianPoint<Scalar>& p, const ComplexMatrix<Scalar>& z,
                        const ComplexMatrix<Scalar>& u, const ComplexMatrix<Scalar>& v) {
  detail::check_shape(p, z);
  const auto& inv = p.inverse();
  const ComplexMatrix<Scalar> d_inv = -inv * z * inv;
  return (d_inv * u * inv * v.adjoint() + inv * u * d_inv * v.adjoint()).trace().real();
}

/// R(Z, W) U = -{{Z, W}, U} / 4
template <typename Scalar>
ComplexMatrix<Scalar> curvature_algebraic(const HermitianPoint<Scalar>& p, const ComplexMatrix<Scalar>& z,
                                          const ComplexMatrix<Scalar>& w, const ComplexMatrix<Scalar>& u) {
  return Scalar(-0.25) * bracket(p, bracket(p, z, w), u);
}

/// R(U, V, Z, W) = G({Z, W}, {U, V}) / 4
template <typename Scalar>
Scalar curvature_form(const HermitianPoint<Scalar>& p, const ComplexMatrix<Scalar>& u,
                      const ComplexMatrix<Scalar>& v, const ComplexMatrix<Scalar>& z,
                      const ComplexMatrix<Scalar>& w) {
  return Scalar(0.25) * inner(p, bracket(p, z, w), bracket(p, u, v));
}

/// K(U, V) = R(U, V, V, U) / (|U|^2 |V|^2 - G(U, V)^2) = -|{U, V}|^2 / (4 Gram)
template <typename Scalar>
Scalar sectional(const HermitianPoint<Scalar>& p, const ComplexMatrix<Scalar>& u, const ComplexMatrix<Scalar>& v) {
  using std::abs;
  const Scalar uu = inner(p, u, u), vv = inner(p, v, v), uv = inner(p, u, v);
  const Scalar gram = uu * vv - uv * uv;
  if (!(abs(gram) > Scalar(1e-12) * abs(uu * vv)))
    throw GeometryError(ErrorKind::DegeneratePlane, "matrices do not span a 2-plane");
  return curvature_form(p, u, v, v, u) / gram;
}

/// nabla'_Z nabla'_W U for constant fields, expanded by the product rule:
/// S(Z, S(W, U)) + D_Z S(W, U), with D_Z acting only through Omega^-1.
template <typename Scalar>
ComplexMatrix<Scalar> second_covariant(const HermitianPoint<Scalar>& p, const ComplexMatrix<Scalar>& z,
                                       const ComplexMatrix<Scalar>& w, const ComplexMatrix<Scalar>& u) {
  const auto& inv = p.inverse();
  const ComplexMatrix<Scalar> inner_field = Scalar(-0.5) * (w * inv * u + u * inv * w);
  const ComplexMatrix<Scalar> outer = Scalar(-0.5) * (z * inv * inner_field + inner_field * inv * z);
  const ComplexMatrix<Scalar> d_inv = -inv * z * inv;
  const ComplexMatrix<Scalar> derivative = Scalar(-0.5) * (w * d_inv * u + u * d_inv * w);
  return outer + derivative;
}

/// nabla'_Z nabla'_W U - nabla'_W nabla'_Z U for constant fields ([Z, W] = 0).
/// Uses no bracket algebra, so it is an independent check of curvature_algebraic.
template <typename Scalar>
ComplexMatrix<Scalar> curvature_oracle(const HermitianPoint<Scalar>& p, const ComplexMatrix<Scalar>& z,
                                       const ComplexMatrix<Scalar>& w, const ComplexMatrix<Scalar>& u) {
  detail::check_shape(p, z);
  detail::check_shape(p, w);
  detail::check_shape(p, u);
  return second_covariant(p, z, w, u) - second_covariant(p, w, z, u);
}

}  // namespace kcone::maass
