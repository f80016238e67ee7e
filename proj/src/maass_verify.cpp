#include "kcone/maass_verify.hpp"

#include <algorithm>
#include <cmath>

namespace kcone::maass {

namespace {

using cd = std::complex<double>;

double relative_residual(const ComplexMatrixd& a, const ComplexMatrixd& b) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

double relative_residual(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Basis E_i of 2x2 Hermitian matrices dual to the coordinates (a, c, Re b, Im b).
ComplexMatrixd coordinate_basis(int i) {
  Vectord e = Vectord::Zero(4);
  e[i] = 1.0;
  return hermitian_from_coordinates(e);
}

}  // namespace

ComplexMatrixd random_hermitian(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  ComplexMatrixd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = cd(gauss(rng), gauss(rng));
  return 0.5 * (a + a.adjoint());
}

ComplexMatrixd random_positive_definite(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  ComplexMatrixd b(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) b(i, j) = cd(gauss(rng), gauss(rng));
  ComplexMatrixd omega = b * b.adjoint() / double(m) + 0.5 * ComplexMatrixd::Identity(m, m);
  return 0.5 * (omega + omega.adjoint());
}

ComplexMatrixd sigma_x() {
  ComplexMatrixd s(2, 2);
  s << 0.0, 1.0, 1.0, 0.0;
  return s;
}

ComplexMatrixd sigma_z() {
  ComplexMatrixd s(2, 2);
  s << 1.0, 0.0, 0.0, -1.0;
  return s;
}

ComplexMatrixd hermitian_from_coordinates(const Vectord& x) {
  if (x.size() != 4) throw GeometryError(ErrorKind::DimensionMismatch, "expected 4 coordinates");
  ComplexMatrixd h(2, 2);
  h(0, 0) = x[0];
  h(1, 1) = x[1];
  h(0, 1) = cd(x[2], x[3]);
  h(1, 0) = cd(x[2], -x[3]);
  return h;
}

Vectord coordinates_from_hermitian(const ComplexMatrixd& omega) {
  if (omega.rows() != 2 || omega.cols() != 2)
    throw GeometryError(ErrorKind::DimensionMismatch, "expected a 2x2 matrix");
  Vectord x(4);
  x << omega(0, 0).real(), omega(1, 1).real(), omega(0, 1).real(), omega(0, 1).imag();
  return x;
}

IntersectionTensor<double> det_form_tensor() {
  // c(x, x) / 2 = a c - (Re b)^2 - (Im b)^2
  return IntersectionTensor<double>(2, 4, {{{0, 1}, 1.0}, {{2, 2}, -2.0}, {{3, 3}, -2.0}});
}

TorusReport torus_consistency(int samples, std::uint64_t seed, double tolerance) {
  const auto tensor = det_form_tensor();
  std::mt19937_64 rng(seed);
  TorusReport report;

  Matrixd gram(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Vectord ei = Vectord::Zero(4), ej = Vectord::Zero(4);
      ei[i] = ej[j] = 1.0;
      gram(i, j) = contract(tensor, {ei, ej}, Vectord(Vectord::Zero(4)));
    }
  report.det_form_signature = signature_of(gram);

  for (int s = 0; s < samples; ++s) {
    const HermitianPoint<double> point(random_positive_definite(2, rng));
    const auto cone = metric_at(tensor, kahler_point(coordinates_from_hermitian(point.omega())));
    Matrixd trace_metric(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) trace_metric(i, j) = inner(point, coordinate_basis(i), coordinate_basis(j));
    const double scale = trace_metric.cwiseAbs().maxCoeff();
    report.max_residual = std::max(report.max_residual, (cone.g - trace_metric).cwiseAbs().maxCoeff() / scale);
    ++report.samples;
  }
  report.pass = report.samples > 0 && report.max_residual < tolerance &&
                report.det_form_signature == Signature{1, 3, 0};
  return report;
}

VerifyReport maass_verify(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  VerifyReport r;

  for (int s = 0; s < samples; ++s) {
    const int m = 2 + s % 2;
    const HermitianPoint<double> p(random_positive_definite(m, rng));
    const auto z = random_hermitian(m, rng);
    const auto w = random_hermitian(m, rng);
    const auto u = random_hermitian(m, rng);
    const auto v = random_hermitian(m, rng);

    r.max_curvature_residual =
        std::max(r.max_curvature_residual, relative_residual(curvature_algebraic(p, z, w, u), curvature_oracle(p, z, w, u)));

    const auto zw = bracket(p, z, w);
    const double lhs = inner(p, bracket(p, zw, u), v);
    const double rhs = -inner(p, zw, bracket(p, u, v));
    r.max_adjoint_residual = std::max(r.max_adjoint_residual, relative_residual(lhs, rhs));

    const ComplexMatrixd jacobi =
        bracket(p, zw, u) + bracket(p, bracket(p, w, u), z) + bracket(p, bracket(p, u, z), w);
    r.max_jacobi_residual = std::max(r.max_jacobi_residual, relative_residual(jacobi, ComplexMatrixd::Zero(m, m)));
    r.max_bracket_hermitian_residual =
        std::max(r.max_bracket_hermitian_residual, relative_residual(zw, ComplexMatrixd(-zw.adjoint())));

    r.max_trace_term = std::max(r.max_trace_term, std::abs(trace_term(p, z)));

    const double derivative = inner_derivative(p, z, u, v);
    const double compat = inner(p, levi_civita(p, z, u), v) + inner(p, u, levi_civita(p, z, v));
    r.max_compatibility_residual = std::max(r.max_compatibility_residual, relative_residual(derivative, compat));

    r.max_sectional = std::max(r.max_sectional, sectional(p, u, v));
    ++r.samples;
  }

  const HermitianPoint<double> identity(ComplexMatrixd::Identity(2, 2));
  r.worked_sectional = sectional(identity, sigma_x(), sigma_z());
  r.torus = torus_consistency(samples, seed + 1);

  r.pass = r.samples > 0 && r.max_curvature_residual < r.tolerance && r.max_adjoint_residual < r.tolerance &&
           r.max_jacobi_residual < r.tolerance && r.max_bracket_hermitian_residual < r.tolerance &&
           r.max_trace_term < r.tolerance && r.max_compatibility_residual < 1e-10 && r.max_sectional <= 1e-10 &&
           r.worked_sectional == -0.5 && r.torus.pass;
  return r;
}

}  // namespace kcone::maass
