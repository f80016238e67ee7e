#pragma once

#include "kcone/intersection_tensor.hpp"
#include "kcone/types.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace kcone {

enum class PathStatus { completed, exited_volume_cone, step_underflow };

const char* status_name(PathStatus status);

struct PathSample {
  double s = 0.0;
  Vectord point;
  Vectord velocity;
  /// speed reached by the integrator before velocity was rescaled to 1
  double speed = 0.0;
};

struct GeodesicPath {
  std::vector<PathSample> samples;
  PathStatus status = PathStatus::completed;
  /// max |speed - 1| over the samples
  double max_speed_drift = 0.0;
  int rejected_steps = 0;

  const PathSample& end() const { return samples.back(); }
};

/// Geodesic acceleration -Gamma^l_jk v^j v^k at t.
Vectord geodesic_acceleration(const IntersectionTensor<double>& c, const Vectord& t, const Vectord& velocity);

/// Integrates the unit-speed geodesic from start in the direction of
/// `direction` over the given arclength with an adaptive Dormand-Prince 5(4)
/// scheme. Steps are rejected on local error or when the speed drifts from 1
/// by more than `tol`; accepted velocities are rescaled to unit speed. The run
/// stops early when the volume falls below 1e-12 of its initial value, or with
/// step_underflow when the step falls below 1e-14 or 200000 attempts have not
/// covered the arclength.
GeodesicPath geodesic_shoot(const IntersectionTensor<double>& c, const ConePoint<double>& start,
                            const Vectord& direction, double arclength, double tol = 1e-10);

/// Length of the piecewise-linear path through `points`, each segment
/// integrated by adaptive Gauss-Legendre quadrature to relative tolerance `tol`.
double path_length(const IntersectionTensor<double>& c, std::span<const Vectord> points, double tol = 1e-12);

struct LengthBoundReport {
  double length = 0.0;
  /// |log Vol(end) - log Vol(start)| / sqrt(n)
  double bound = 0.0;
  double slack = 0.0;
  bool pass = false;
};

/// Compares the length of a path with the volume lower bound; passes when
/// length >= bound - 1e-9.
LengthBoundReport length_bound_check(const IntersectionTensor<double>& c, std::span<const Vectord> points);

struct RayRow {
  double t_min = 0.0;
  /// length of alpha + t omega over [t_min, 1]
  double length = 0.0;
  /// |log Vol(alpha + omega) - log Vol(alpha + t_min omega)| / sqrt(n)
  double bound = 0.0;
};

enum class RayVerdict { converged, diverging, inconclusive };

const char* verdict_name(RayVerdict verdict);

struct BoundaryRayReport {
  std::vector<RayRow> rows;
  /// Vol(alpha), from the exact ray polynomial
  double boundary_volume = 0.0;
  RayVerdict verdict = RayVerdict::inconclusive;
};

/// Lengths of the ray alpha + t omega over [t_min, 1] for a strictly
/// decreasing sequence of t_min in (0, 1). Volume and the integrands are
/// evaluated from exact polynomials in t, so t_min can approach zero without
/// cancellation. The verdict reports evidence only:
///   converged    successive lengths differ by < 1e-4 of the last one;
///   diverging    not converged, Vol(alpha) = 0 so the volume bound is
///                unbounded, and every length dominates its bound;
///   inconclusive otherwise.
BoundaryRayReport boundary_ray_study(const IntersectionTensor<double>& c, const Vectord& alpha,
                                     const Vectord& omega, std::span<const double> t_min_sequence,
                                     double tol = 1e-12);

/// Columns s, t_0..t_{N-1}, speed.
void write_path_csv(std::ostream& out, const GeodesicPath& path);

}  // namespace kcone
