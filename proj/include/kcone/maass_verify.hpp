#pragma once

#include "kcone/cone_metric.hpp"
#include "kcone/intersection_tensor.hpp"
#include "kcone/maass.hpp"

#include <cstdint>
#include <random>

namespace kcone::maass {

using ComplexMatrixd = ComplexMatrix<double>;

ComplexMatrixd random_hermitian(int m, std::mt19937_64& rng);

/// B B^* / m + I / 2 for Gaussian B; condition number stays moderate.
ComplexMatrixd random_positive_definite(int m, std::mt19937_64& rng);

/// Pauli-type 2x2 matrices used in the worked curvature value.
ComplexMatrixd sigma_x();
ComplexMatrixd sigma_z();

// Real coordinates (a, c, Re b, Im b) of the 2x2 Hermitian matrix [[a, b], [conj(b), c]].
ComplexMatrixd hermitian_from_coordinates(const Vectord& x);
Vectord coordinates_from_hermitian(const ComplexMatrixd& omega);

/// det of a 2x2 Hermitian matrix, a c - |b|^2, as a degree-2 tensor on the
/// coordinates above (Vol = det).
IntersectionTensor<double> det_form_tensor();

struct TorusReport {
  int samples = 0;
  double max_residual = 0.0;
  Signature det_form_signature;
  bool pass = false;
};

/// Compares the Hessian metric of the det-form tensor with the trace metric on
/// random positive-definite 2x2 points.
TorusReport torus_consistency(int samples, std::uint64_t seed, double tolerance = 1e-10);

struct VerifyReport {
  int samples = 0;
  double max_curvature_residual = 0.0;     // algebraic vs oracle
  double max_adjoint_residual = 0.0;       // G({{Z,W},U},V) + G({Z,W},{U,V})
  double max_jacobi_residual = 0.0;
  double max_bracket_hermitian_residual = 0.0;  // {Z,W} + {Z,W}^*
  double max_trace_term = 0.0;
  double max_compatibility_residual = 0.0;
  double max_sectional = -1.0;
  double worked_sectional = 0.0;  // K(sigma_x, sigma_z) at Omega = I
  double tolerance = 1e-12;
  TorusReport torus;
  bool pass = false;
};

/// Runs every matrix-model identity on random Hermitian triples, m in {2, 3}.
VerifyReport maass_verify(int samples, std::uint64_t seed);

}  // namespace kcone::maass
