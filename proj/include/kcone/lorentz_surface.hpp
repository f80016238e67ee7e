#pragma once

#include "kcone/cone_metric.hpp"
#include "kcone/intersection_tensor.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace kcone {

/// Adapted coordinates for a surface (degree-2) intersection form.
///
/// The columns of `basis` are (omega0 / sqrt(Vol(omega0)), u_1, ..., u_{N-1})
/// with u_j primitive at omega0 and basis^T M basis = diag(2, -2, ..., -2),
/// M being the Gram matrix of the form. In these coordinates
/// Vol(basis * s) = q(s) = s_0^2 - sum_j s_j^2 exactly.
struct LorentzModel {
  int dimension = 0;
  Matrixd gram;
  Matrixd basis;
  Matrixd inverse_basis;
  /// diag(1, -1, ..., -1)
  Vectord eta;
  Signature signature;

  Vectord to_original(const Vectord& s) const { return basis * s; }
  Vectord to_standard(const Vectord& t) const { return inverse_basis * t; }
  double q(const Vectord& s) const;
};

/// Gram matrix M_ij = c(e_i, e_j) of a degree-2 tensor.
Matrixd bilinear_gram(const IntersectionTensor<double>& c);

/// The tensor of q itself: c_00 = 2, c_jj = -2.
IntersectionTensor<double> standard_quadratic_tensor(int dimension);

LorentzModel reduce_to_standard(const IntersectionTensor<double>& c, const Vectord& omega0);

/// Random element of SO+(1, N-1): exp(eta A) for a random antisymmetric A with
/// Gaussian entries of size `spread`.
Matrixd random_lorentz_element(int dimension, std::mt19937_64& rng, double spread = 0.5);

/// Random points of the component {q > 0, s_0 > 0}, in standard coordinates.
std::vector<Vectord> sample_positive_component(int dimension, int count, std::uint64_t seed);

struct IsometryReport {
  int samples = 0;
  /// max over samples of |L^T g(L s) L - g(s)| / |g(s)| (max norms)
  double max_metric_residual = 0.0;
  /// max |L^T eta L - eta| over the Lorentz factors
  double max_group_residual = 0.0;
  bool pass = false;
};

/// Applies one random element of R_+ x SO+(1, N-1) per sample point and checks
/// it pulls the metric of -log q back to itself.
IsometryReport lorentz_isometry_check(const LorentzModel& model, std::span<const Vectord> samples,
                                      std::uint64_t seed, double tolerance = 1e-8);

/// Same check for one fixed element lambda * L in standard coordinates.
IsometryReport lorentz_isometry_check(const LorentzModel& model, std::span<const Vectord> samples,
                                      const Matrixd& lorentz, double dilation, double tolerance = 1e-8);

struct FullConeReport {
  int samples = 0;
  double positive_fraction = 0.0;
  std::vector<Vectord> failures;
};

/// Positive-definiteness of g at sample points of {q > 0, s_0 > 0}; sample
/// points are in standard coordinates and are checked through the original
/// tensor at to_original(s).
FullConeReport full_cone_check(const IntersectionTensor<double>& c, const LorentzModel& model,
                               std::span<const Vectord> samples);

}  // namespace kcone
