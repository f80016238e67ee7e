#include "kcone/geodesics.hpp"

#include "kcone/cone_metric.hpp"
#include "kcone/curvature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>

namespace kcone {

const char* status_name(PathStatus status) {
  switch (status) {
    case PathStatus::completed: return "completed";
    case PathStatus::exited_volume_cone: return "exited_volume_cone";
    case PathStatus::step_underflow: return "step_underflow";
  }
  return "unknown";
}

const char* verdict_name(RayVerdict verdict) {
  switch (verdict) {
    case RayVerdict::converged: return "converged";
    case RayVerdict::diverging: return "diverging";
    case RayVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

constexpr double kMinStep = 1e-14;
constexpr double kVolumeFloor = 1e-12;
// Attempts allowed before a stalled run is reported as step_underflow.
constexpr long kMaxAttempts = 200000;

// Five-point Gauss-Legendre on [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  static constexpr std::array<double, 5> x = {0.0, -0.5384693101056831, 0.5384693101056831,
                                              -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> w = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                              0.2369268850561891, 0.2369268850561891};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * f(mid + half * x[i]);
  return half * sum;
}

double adaptive(const std::function<double(double)>& f, double a, double b, double whole, double tol, int depth,
                int& budget) {
  const double mid = 0.5 * (a + b);
  const double left = gauss_legendre(f, a, mid);
  const double right = gauss_legendre(f, mid, b);
  --budget;
  if (depth >= 48 || budget <= 0 || (depth >= 2 && std::abs(left + right - whole) <= tol)) return left + right;
  return adaptive(f, a, mid, left, 0.5 * tol, depth + 1, budget) +
         adaptive(f, mid, b, right, 0.5 * tol, depth + 1, budget);
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  const double whole = gauss_legendre(f, a, b);
  // Below a few ulps the refinement only chases rounding noise.
  const double tol = std::max({rel_tol, 32.0 * std::numeric_limits<double>::epsilon()}) * std::abs(whole);
  int budget = 1 << 14;
  return adaptive(f, a, b, whole, std::max(tol, std::numeric_limits<double>::min()), 0, budget);
}

double segment_speed(const IntersectionTensor<double>& c, const Vectord& t, const Vectord& d) {
  const double q = metric_value(c, t, d, d);
  if (q < 0.0) {
    if (q < -1e-12 * d.squaredNorm() / std::max(1e-300, t.squaredNorm()))
      throw GeometryError(ErrorKind::NotPositiveDefinite, "path tangent has negative squared length");
    return 0.0;
  }
  return std::sqrt(q);
}

struct State {
  Vectord t;
  Vectord v;
};

struct StepFailure {
  bool volume = false;
};

}  // namespace

Vectord geodesic_acceleration(const IntersectionTensor<double>& c, const Vectord& t, const Vectord& velocity) {
  const auto conn = christoffel_at(c, volume_point<double>(t));
  const int N = c.rank();
  Vectord a = Vectord::Zero(N);
  for (int l = 0; l < N; ++l)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) a[l] -= conn.christoffel_second(l, j, k) * velocity[j] * velocity[k];
  return a;
}

GeodesicPath geodesic_shoot(const IntersectionTensor<double>& c, const ConePoint<double>& start,
                            const Vectord& direction, double arclength, double tol) {
  if (!(arclength >= 0.0)) throw GeometryError(ErrorKind::InvalidArgument, "arclength must be nonnegative");
  if (!(tol > 0.0)) throw GeometryError(ErrorKind::InvalidArgument, "tolerance must be positive");
  if (direction.size() != c.rank())
    throw GeometryError(ErrorKind::DimensionMismatch, "direction does not match the tensor rank");

  const auto m0 = metric_at(c, start);
  const double vol0 = m0.vol;
  const double norm2 = direction.dot(m0.g * direction);
  if (!(norm2 > 0.0)) throw GeometryError(ErrorKind::InvalidArgument, "initial direction must have g(u, u) > 0");

  GeodesicPath path;
  State y{start.t, direction / std::sqrt(norm2)};
  path.samples.push_back({0.0, y.t, y.v, 1.0});
  if (arclength == 0.0) return path;

  // Dormand-Prince 5(4) tableau.
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
  };
  static constexpr double err_w[7] = {71.0 / 57600,  0.0,         -71.0 / 16695, 71.0 / 1920,
                                      -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

  const double local_tol = std::max(1e-2 * tol, 1e-15);
  const double vol_floor = kVolumeFloor * vol0;
  double s = 0.0;
  double h = arclength / 32.0;
  StepFailure last_failure;

  auto derivative = [&](const State& x, StepFailure& failure) -> std::optional<State> {
    try {
      if (!(volume(c, x.t) > vol_floor)) {
        failure.volume = true;
        return std::nullopt;
      }
      return State{x.v, geodesic_acceleration(c, x.t, x.v)};
    } catch (const GeometryError& e) {
      failure.volume = e.kind() == ErrorKind::VolumeNotPositive;
      return std::nullopt;
    }
  };

  double magnification = y.v.cwiseAbs().dot(m0.g.cwiseAbs() * y.v.cwiseAbs());
  long attempts = 0;
  while (s < arclength) {
    h = std::min(h, arclength - s);
    if (h < kMinStep || ++attempts > kMaxAttempts) {
      path.status = last_failure.volume ? PathStatus::exited_volume_cone : PathStatus::step_underflow;
      break;
    }

    StepFailure failure;
    std::array<State, 7> k;
    bool ok = true;
    for (int stage = 0; stage < 7 && ok; ++stage) {
      State x = y;
      for (int j = 0; j < stage; ++j) {
        x.t += h * a[stage][j] * k[j].t;
        x.v += h * a[stage][j] * k[j].v;
      }
      auto d = derivative(x, failure);
      if (!d) {
        ok = false;
        break;
      }
      k[stage] = std::move(*d);
    }
    if (!ok) {
      last_failure = failure;
      ++path.rejected_steps;
      h *= 0.25;
      continue;
    }

    // The seventh stage is evaluated at the fifth-order solution.
    State next = y;
    State err{Vectord::Zero(y.t.size()), Vectord::Zero(y.v.size())};
    for (int j = 0; j < 6; ++j) {
      next.t += h * a[6][j] * k[j].t;
      next.v += h * a[6][j] * k[j].v;
    }
    for (int j = 0; j < 7; ++j) {
      err.t += h * err_w[j] * k[j].t;
      err.v += h * err_w[j] * k[j].v;
    }
    // Close to the null cone the stages are only accurate to eps times the
    // cancellation in g(v, v); asking for more than that stalls the step.
    const double step_tol = std::max(local_tol, 16.0 * std::numeric_limits<double>::epsilon() * magnification);
    double err_norm = 0.0;
    for (Eigen::Index i = 0; i < y.t.size(); ++i) {
      const double st = step_tol * (1.0 + std::max(std::abs(y.t[i]), std::abs(next.t[i])));
      const double sv = step_tol * (1.0 + std::max(std::abs(y.v[i]), std::abs(next.v[i])));
      err_norm = std::max({err_norm, std::abs(err.t[i]) / st, std::abs(err.v[i]) / sv});
    }

    double next_speed = 0.0;
    bool speed_ok = false;
    try {
      const double q = metric_value(c, next.t, next.v, next.v);
      if (q > 0.0) {
        next_speed = std::sqrt(q);
        speed_ok = std::abs(next_speed - 1.0) <= tol;
      }
    } catch (const GeometryError& e) {
      last_failure.volume = e.kind() == ErrorKind::VolumeNotPositive;
    }

    if (err_norm > 1.0 || !speed_ok) {
      ++path.rejected_steps;
      const double factor = err_norm > 1.0 ? std::max(0.2, 0.9 * std::pow(err_norm, -0.2)) : 0.25;
      h *= factor;
      continue;
    }

    s = (arclength - s - h <= kMinStep) ? arclength : s + h;
    y = std::move(next);
    path.max_speed_drift = std::max(path.max_speed_drift, std::abs(next_speed - 1.0));
    // Project back onto the unit-speed shell.
    y.v /= next_speed;
    magnification = y.v.cwiseAbs().dot(metric_at(c, volume_point<double>(y.t)).g.cwiseAbs() * y.v.cwiseAbs());
    path.samples.push_back({s, y.t, y.v, next_speed});
    last_failure = StepFailure{};

    if (!(volume(c, y.t) > vol_floor)) {
      path.status = PathStatus::exited_volume_cone;
      break;
    }
    const double grow = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
    h *= std::clamp(grow, 0.2, 5.0);
  }
  return path;
}

double path_length(const IntersectionTensor<double>& c, std::span<const Vectord> points, double tol) {
  double total = 0.0;
  for (const auto& p : points) {
    if (p.size() != c.rank()) throw GeometryError(ErrorKind::DimensionMismatch, "path point has wrong dimension");
    require_positive_volume(volume(c, p));
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vectord& p0 = points[i - 1];
    const Vectord d = points[i] - p0;
    if (d.squaredNorm() == 0.0) continue;
    total += integrate([&](double tau) { return segment_speed(c, Vectord(p0 + tau * d), d); }, 0.0, 1.0, tol);
  }
  return total;
}

LengthBoundReport length_bound_check(const IntersectionTensor<double>& c, std::span<const Vectord> points) {
  if (points.empty()) throw GeometryError(ErrorKind::InvalidArgument, "path has no points");
  LengthBoundReport r;
  r.length = path_length(c, points);
  const double v0 = volume(c, points.front());
  const double v1 = volume(c, points.back());
  r.bound = std::abs(std::log(v1) - std::log(v0)) / std::sqrt(double(c.degree()));
  r.slack = r.length - r.bound;
  r.pass = r.slack >= -1e-9;
  return r;
}

namespace {

// Coefficients, lowest degree first, of t -> c(omega^j, (alpha + t omega)^(n-j)) / (n-j)!.
std::vector<double> ray_polynomial(const IntersectionTensor<double>& c, const Vectord& alpha, const Vectord& omega,
                                   int j) {
  const int n = c.degree();
  std::vector<double> coeffs;
  for (int k = 0; j + k <= n; ++k) {
    const std::vector<Vectord> vs(j + k, omega);
    coeffs.push_back(contract(c, std::span<const Vectord>(vs), alpha) / factorial<double>(k));
  }
  return coeffs;
}

double evaluate(const std::vector<double>& p, double t) {
  double s = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * t + *it;
  return s;
}

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace

BoundaryRayReport boundary_ray_study(const IntersectionTensor<double>& c, const Vectord& alpha, const Vectord& omega,
                                     std::span<const double> t_min_sequence, double tol) {
  if (alpha.size() != c.rank() || omega.size() != c.rank())
    throw GeometryError(ErrorKind::DimensionMismatch, "ray data does not match the tensor rank");
  for (std::size_t i = 0; i < t_min_sequence.size(); ++i) {
    const double t = t_min_sequence[i];
    if (!(t > 0.0 && t < 1.0) || (i > 0 && !(t < t_min_sequence[i - 1])))
      throw GeometryError(ErrorKind::InvalidArgument, "t_min sequence must decrease strictly inside (0, 1)");
  }

  const auto vol = ray_polynomial(c, alpha, omega, 0);
  const auto p1 = ray_polynomial(c, alpha, omega, 1);
  std::vector<double> numerator = multiply(p1, p1);
  if (c.degree() >= 2) {
    const auto p2v = multiply(ray_polynomial(c, alpha, omega, 2), vol);
    numerator.resize(std::max(numerator.size(), p2v.size()), 0.0);
    for (std::size_t i = 0; i < p2v.size(); ++i) numerator[i] -= p2v[i];
  }

  auto checked_volume = [&](double t) {
    const double v = evaluate(vol, t);
    require_positive_volume(v);
    return v;
  };
  // Length element in the log variable: sqrt(h(t)) dt = sqrt(h(e^s)) e^s ds.
  auto integrand = [&](double s) {
    const double t = std::exp(s);
    const double v = checked_volume(t);
    const double num = evaluate(numerator, t);
    if (num < 0.0) {
      if (num < -1e-12 * v * v * omega.squaredNorm())
        throw GeometryError(ErrorKind::NotPositiveDefinite, "ray tangent has negative squared length");
      return 0.0;
    }
    return std::sqrt(num) / v * t;
  };

  BoundaryRayReport report;
  report.boundary_volume = vol.front();
  const double log_vol_end = std::log(checked_volume(1.0));
  const double sqrt_n = std::sqrt(double(c.degree()));
  double length = 0.0;
  double upper = 0.0;
  for (const double t_min : t_min_sequence) {
    const double lower = std::log(t_min);
    length += integrate(integrand, lower, upper, tol);
    upper = lower;
    report.rows.push_back({t_min, length, std::abs(log_vol_end - std::log(checked_volume(t_min))) / sqrt_n});
  }

  const auto& rows = report.rows;
  const bool converged = rows.size() >= 2 &&
                         std::abs(rows.back().length - rows[rows.size() - 2].length) < 1e-4 * rows.back().length;
  double scale = 0.0;
  for (double a : vol) scale += std::abs(a);
  const bool bound_unbounded = std::abs(report.boundary_volume) <= 1e-12 * scale;
  const bool dominated = std::all_of(rows.begin(), rows.end(), [](const RayRow& r) {
    return r.length >= r.bound - 1e-9 * std::max(1.0, r.bound);
  });
  if (converged) report.verdict = RayVerdict::converged;
  else if (bound_unbounded && dominated && !rows.empty()) report.verdict = RayVerdict::diverging;
  else report.verdict = RayVerdict::inconclusive;
  return report;
}

void write_path_csv(std::ostream& out, const GeodesicPath& path) {
  const auto old_precision = out.precision(17);
  const std::size_t N = path.samples.empty() ? 0 : static_cast<std::size_t>(path.samples.front().point.size());
  out << "s";
  for (std::size_t i = 0; i < N; ++i) out << ",t_" << i;
  out << ",speed\n";
  for (const auto& sample : path.samples) {
    out << sample.s;
    for (Eigen::Index i = 0; i < sample.point.size(); ++i) out << ',' << sample.point[i];
    out << ',' << sample.speed << '\n';
  }
  out.precision(old_precision);
}

}  // namespace kcone
