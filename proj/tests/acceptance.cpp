// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance          run every criterion
//   acceptance 3 7      run the listed criteria
// Exit status is 0 iff every selected criterion passes.

#include "kcone/cone_metric.hpp"
#include "kcone/curvature.hpp"
#include "kcone/geodesics.hpp"
#include "kcone/io.hpp"
#include "kcone/lorentz_surface.hpp"
#include "kcone/maass.hpp"
#include "kcone/maass_verify.hpp"
#include "kcone/scanner.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace kcone;
using kcone::testing::fixture;
using kcone::testing::gaussian_vector;
using kcone::testing::random_kahler_point;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double seconds;
  std::function<Outcome()> run;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

Vectord vec(std::initializer_list<double> xs) {
  Vectord v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<TensorFile> kahler_fixtures() {
  std::vector<TensorFile> out;
  for (auto& f : kcone::testing::all_fixtures())
    if (!f.kahler_points.empty()) out.push_back(std::move(f));
  return out;
}

// D_u Vol(t) from five exact volume samples along t + s u; the stencil is exact
// for polynomials of degree <= 4, which covers every fixture.
double directional_volume_derivative(const IntersectionTensor<double>& c, const Vectord& t, const Vectord& u) {
  const double h = 0.1 * t.norm() / std::max(u.norm(), 1e-300);
  auto f = [&](double s) { return oracle::dense_volume(c, Vectord(t + s * u)); };
  return (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h);
}

// ---------------------------------------------------------------------------

Outcome one_dimensional_model() {
  const auto c = fixture("quintic_like").tensor;
  const double g = metric_at(c, kahler_point(vec({1.0}))).g(0, 0);
  const auto path = geodesic_shoot(c, kahler_point(vec({1.0})), vec({1.0}), std::sqrt(3.0));
  std::vector<Vectord> points;
  for (const auto& s : path.samples) points.push_back(s.point);
  const auto bound = length_bound_check(c, points);
  const double metric_err = std::abs(g - 3.0);
  const double end_err = std::abs(path.end().point[0] - std::numbers::e);
  const double equality_err = std::abs(bound.length - bound.bound);
  return {metric_err <= 1e-12 && path.status == PathStatus::completed && end_err <= 1e-8 && equality_err <= 1e-9,
          "|g-3| " + sci(metric_err) + ", |t-e| " + sci(end_err) + ", |L-bound| " + sci(equality_err)};
}

Outcome radial_identities() {
  const auto fixtures = kahler_fixtures();
  std::mt19937_64 rng(2001);
  double radial = 0.0, mixed = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto& f = fixtures[i % fixtures.size()];
    const Vectord t = random_kahler_point(f, rng, 0.2);
    const Vectord u = gaussian_vector(f.tensor.rank(), rng);
    const auto m = metric_at(f.tensor, volume_point(t));
    radial = std::max(radial, std::abs(t.dot(m.g * t) - f.tensor.degree()));
    const double expected = directional_volume_derivative(f.tensor, t, u) / oracle::dense_volume(f.tensor, t);
    mixed = std::max(mixed, std::abs(u.dot(m.g * t) - expected) / std::max(1.0, std::abs(expected)));
  }
  return {radial <= 1e-10 && mixed <= 1e-10, "max |g(t,t)-n| " + sci(radial) + ", max |g(u,t)-D_u log Vol| " + sci(mixed)};
}

Outcome primitive_decomposition() {
  const auto fixtures = kahler_fixtures();
  std::mt19937_64 rng(2003);
  double literal = 0.0, radial_factor_n = 0.0;
  int degree_one_cases = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto& f = fixtures[i % fixtures.size()];
    const int n = f.tensor.degree();
    degree_one_cases += n == 1;
    const Vectord t = random_kahler_point(f, rng, 0.2);
    const Vectord u = gaussian_vector(f.tensor.rank(), rng), v = gaussian_vector(f.tensor.rank(), rng);
    const auto du = primitive_decompose(f.tensor, t, u);
    const auto dv = primitive_decompose(f.tensor, t, v);
    const double g = metric_value(f.tensor, t, u, v);
    const double level = levelset_metric(f.tensor, t, du.primitive, dv.primitive);
    const double scale = std::max(1.0, std::abs(g));
    literal = std::max(literal, std::abs(g - (double(n) * n * du.radial * dv.radial + level)) / scale);
    radial_factor_n = std::max(radial_factor_n, std::abs(g - (double(n) * du.radial * dv.radial + level)) / scale);
  }
  return {literal <= 1e-10, "max residual with n^2 u0 v0 " + sci(literal) + " (" + std::to_string(degree_one_cases) +
                                " of 1000 cases have n = 1); with g(t,t) u0 v0 = n u0 v0 " + sci(radial_factor_n)};
}

Outcome curvature_oracle_agreement() {
  std::vector<TensorFile> fixtures;
  for (auto& f : kahler_fixtures())
    if ((f.tensor.degree() == 2 || f.tensor.degree() == 3) && f.tensor.rank() <= 4) fixtures.push_back(std::move(f));
  std::mt19937_64 rng(2005);
  double christoffel = 0.0, riemann = 0.0, symmetry = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto& f = fixtures[i % fixtures.size()];
    const auto point = kahler_point(random_kahler_point(f, rng, 0.2));
    const auto exact = riemann_at(f.tensor, point);
    const auto fd = oracle::fd_curvature_oracle(f.tensor, point);
    const double scale = oracle::curvature_scale(exact);
    christoffel = std::max(christoffel, oracle::max_abs_difference(exact.christoffel_second, fd.christoffel_second) /
                                            oracle::max_abs(exact.christoffel_second));
    riemann = std::max(riemann, oracle::max_abs_difference(exact.riemann, fd.riemann) / scale);
    symmetry = std::max(symmetry, oracle::riemann_symmetry_residual(exact.riemann, scale));
  }
  return {christoffel <= 1e-5 && riemann <= 1e-5 && symmetry <= 1e-8,
          "Gamma rel " + sci(christoffel) + ", R rel " + sci(riemann) + ", symmetries/Bianchi " + sci(symmetry)};
}

Outcome matrix_model_curvature() {
  using namespace kcone::maass;
  std::mt19937_64 rng(2007);
  double oracle_residual = 0.0, adjoint = 0.0, jacobi = 0.0, k_max = -1e300;
  for (int i = 0; i < 100; ++i) {
    const int m = i % 2 == 0 ? 2 : 3;
    const HermitianPoint<double> p(random_positive_definite(m, rng));
    const ComplexMatrixd z = random_hermitian(m, rng), w = random_hermitian(m, rng), u = random_hermitian(m, rng),
                         v = random_hermitian(m, rng);
    const ComplexMatrixd algebraic = curvature_algebraic(p, z, w, u);
    const ComplexMatrixd expanded = curvature_oracle(p, z, w, u);
    oracle_residual = std::max(oracle_residual, (algebraic - expanded).cwiseAbs().maxCoeff() /
                                                    std::max(1.0, expanded.cwiseAbs().maxCoeff()));
    const ComplexMatrixd zw = bracket(p, z, w);
    const double lhs = inner(p, bracket(p, zw, u), v);
    adjoint = std::max(adjoint, std::abs(lhs + inner(p, zw, bracket(p, u, v))) / std::max(1.0, std::abs(lhs)));
    const ComplexMatrixd cyclic = bracket(p, zw, u) + bracket(p, bracket(p, w, u), z) + bracket(p, bracket(p, u, z), w);
    jacobi = std::max(jacobi, cyclic.cwiseAbs().maxCoeff() / std::max(1.0, bracket(p, zw, u).cwiseAbs().maxCoeff()));
    k_max = std::max(k_max, sectional(p, z, w));
  }
  const double worked = sectional(HermitianPoint<double>(ComplexMatrixd::Identity(2, 2)), sigma_x(), sigma_z());
  return {oracle_residual <= 1e-12 && adjoint <= 1e-12 && jacobi <= 1e-12 && k_max <= 1e-10 && worked == -0.5,
          "oracle " + sci(oracle_residual) + ", adjoint " + sci(adjoint) + ", Jacobi " + sci(jacobi) + ", K_max " +
              sci(k_max) + ", K(sx,sz) " + format_number(worked)};
}

Outcome torus() {
  using namespace kcone::maass;
  const auto c = det_form_tensor();
  std::mt19937_64 rng(2009);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const HermitianPoint<double> p(random_positive_definite(2, rng));
    const ComplexMatrixd u = random_hermitian(2, rng), v = random_hermitian(2, rng);
    const Matrixd g = metric_at(c, volume_point(coordinates_from_hermitian(p.omega()))).g;
    const double cone = coordinates_from_hermitian(u).dot(g * coordinates_from_hermitian(v));
    const double trace = inner(p, u, v);
    worst = std::max(worst, std::abs(cone - trace) / std::max(1.0, std::abs(trace)));
  }
  const auto report = torus_consistency(100, 2011);
  return {worst <= 1e-10 && report.pass, "max |g - tr metric| " + sci(worst) + ", library report " +
                                             sci(report.max_residual)};
}

Outcome surface_nonpositivity() {
  double k_max = -1e300, isometry = 0.0;
  int surfaces = 0;
  bool all_pass = true;
  std::string skipped;
  for (const auto& f : kcone::testing::fixtures_of_degree(2)) {
    if (f.tensor.rank() < 2) {
      skipped += " " + f.name;  // no 2-planes exist
      continue;
    }
    ++surfaces;
    const auto model = reduce_to_standard(f.tensor, f.kahler_points.front());
    auto points = sample_cone_points(f.tensor, f.kahler_points, 50, 0.3, 7, true);
    for (const auto& s : sample_positive_component(f.tensor.rank(), 50, 9)) points.push_back(model.to_original(s));
    ScanOptions options;
    options.planes_per_point = 100;
    options.optimize = true;
    options.seed = 2013;
    options.threads = 4;
    const auto report = scan_sectional(f.tensor, points, options, f.name);
    all_pass = all_pass && report.samples.size() >= 10000 && report.k_max <= 1e-8;
    k_max = std::max(k_max, report.k_max);
    const auto iso = lorentz_isometry_check(model, sample_positive_component(f.tensor.rank(), 100, 2015), 2017);
    all_pass = all_pass && iso.pass && iso.max_metric_residual < 1e-8;
    isometry = std::max(isometry, iso.max_metric_residual);
  }
  return {all_pass && surfaces > 0, std::to_string(surfaces) + " surfaces x 10^4 planes, K_max " + sci(k_max) +
                                        ", isometry residual " + sci(isometry) +
                                        (skipped.empty() ? "" : "; rank-1 skipped:" + skipped)};
}

Outcome completeness_dichotomy() {
  std::ostringstream detail;
  bool pass = true;
  // (a) volume-positive boundary class
  {
    const auto c = fixture("blowup_p2").tensor;
    std::vector<double> t_min;
    for (int k = 1; k <= 12; ++k) t_min.push_back(std::pow(10.0, -k));
    const auto coarse = boundary_ray_study(c, vec({1.0, 0.0}), vec({2.0, 1.0}), t_min, 1e-10);
    const auto fine = boundary_ray_study(c, vec({1.0, 0.0}), vec({2.0, 1.0}), t_min, 1e-14);
    const double last = fine.rows.back().length;
    const double tail = std::abs(fine.rows.back().length - fine.rows[fine.rows.size() - 2].length) / last;
    const double refine = std::abs(coarse.rows.back().length - last) / last;
    pass = pass && std::isfinite(last) && tail <= 0.01 && refine <= 0.01 && fine.verdict == RayVerdict::converged;
    detail << "(a) L -> " << format_number(last) << " " << verdict_name(fine.verdict) << ", tail " << sci(tail)
           << ", refinement " << sci(refine);
  }
  // (b) rays along which Vol -> 0
  struct Ray {
    const char* label;
    IntersectionTensor<double> c;
    Vectord alpha, omega;
  };
  const std::vector<Ray> rays = {
      {"N=1", fixture("quintic_like").tensor, vec({0.0}), vec({1.0})},
      {"q=0", standard_quadratic_tensor(3), vec({1.0, 1.0, 0.0}), vec({1.0, 0.0, 0.0})},
      {"blowup null", fixture("blowup_p2").tensor, vec({1.0, 1.0}), vec({2.0, 1.0})},
  };
  for (const auto& ray : rays) {
    std::vector<double> t_min;
    BoundaryRayReport report;
    bool reached = false;
    for (int k = 1; k <= 300 && !reached; ++k) {
      t_min.push_back(std::pow(10.0, -0.5 * k));
      report = boundary_ray_study(ray.c, ray.alpha, ray.omega, t_min);
      reached = report.rows.back().length > 10.0 * report.rows.front().length;
    }
    bool dominated = true, bound_grows = true;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      dominated = dominated && report.rows[i].length >= report.rows[i].bound - 1e-9;
      if (i > 0) bound_grows = bound_grows && report.rows[i].bound > report.rows[i - 1].bound;
    }
    pass = pass && reached && dominated && bound_grows && report.boundary_volume == 0.0;
    detail << "; (b) " << ray.label << ": L " << format_number(report.rows.front().length) << " -> "
           << format_number(report.rows.back().length) << " at t=" << sci(report.rows.back().t_min)
           << (dominated ? ", >= bound" : ", BELOW bound");
  }
  return {pass, detail.str()};
}

Outcome length_lemma() {
  const auto fixtures = kahler_fixtures();
  std::mt19937_64 rng(2019);
  std::uniform_int_distribution<int> count(2, 6);
  double worst_slack = 1e300;
  int tested = 0, failures = 0;
  while (tested < 1000) {
    const auto& f = fixtures[tested % fixtures.size()];
    std::vector<Vectord> points;
    const int m = count(rng);
    for (int i = 0; i < m; ++i) points.push_back(random_kahler_point(f, rng, 0.3));
    bool inside = true;
    for (int i = 1; i < m && inside; ++i)
      for (int s = 1; s < 32 && inside; ++s)
        inside = volume(f.tensor, Vectord(points[i - 1] + (points[i] - points[i - 1]) * (s / 32.0))) > 0.0;
    if (!inside) continue;
    const auto report = length_bound_check(f.tensor, points);
    failures += !(report.length >= report.bound - 1e-9);
    worst_slack = std::min(worst_slack, report.slack);
    ++tested;
  }
  return {failures == 0, std::to_string(tested) + " paths, " + std::to_string(failures) + " failures, min slack " +
                             sci(worst_slack)};
}

Outcome pullback() {
  const auto c = fixture("blowup_p2").tensor;
  const std::vector<Vectord> samples = {vec({2.0, 1.0}), vec({3.0, 0.5}), vec({1.5, -0.7})};
  const auto identity = pullback_check(c, c, Matrixd(Matrixd::Identity(2, 2)), 1.0, std::span(samples));
  const IntersectionTensor<double> square(2, 1, {{{0, 0}, 2.0}});
  const std::vector<Vectord> ones = {vec({1.0}), vec({0.3}), vec({4.0})};
  const Matrixd doubling = Matrixd::Constant(1, 1, 2.0);
  const auto scaling = pullback_check(square, square, doubling, 4.0, std::span(ones));
  const IntersectionTensor<double> perturbed(2, 1, {{{0, 0}, 2.0 * 1.01}});
  const auto control = pullback_check(perturbed, square, doubling, 4.0, std::span(ones));
  const double worst = std::max({identity.max_volume_residual, identity.max_metric_residual,
                                 scaling.max_volume_residual, scaling.max_metric_residual});
  return {identity.pass && scaling.pass && worst < 1e-10 && !control.pass,
          "identity/scaling residual " + sci(worst) + ", 1% control residual " + sci(control.max_volume_residual) +
              (control.pass ? " (passed: wrong)" : " (fails as it should)")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "one-dimensional model: metric, geodesic endpoint, length equality", 1.0, one_dimensional_model},
      {2, "radial identities g(t,t) = n and g(u,t) = D_u log Vol", 5.0, radial_identities},
      {3, "primitive decomposition g(u,v) = n^2 u0 v0 + g_lambda(u1,v1)", 5.0, primitive_decomposition},
      {4, "connection and curvature against the finite-difference oracle", 30.0, curvature_oracle_agreement},
      {5, "matrix-model bracket curvature", 10.0, matrix_model_curvature},
      {6, "det-form Hessian equals the trace metric", 5.0, torus},
      {7, "surface sectional curvature <= 0 and Lorentz isometries", 60.0, surface_nonpositivity},
      {8, "boundary rays: finite length vs dominated divergence", 30.0, completeness_dichotomy},
      {9, "length lower bound on random paths", 30.0, length_lemma},
      {10, "pullback identity, scaling and negative control", 1.0, pullback},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  bool all = true;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = elapsed < c.seconds;
    const bool pass = outcome.pass && in_time;
    all = all && pass;
    std::printf("%s criterion %d: %s | %s | %.3f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.title,
                outcome.detail.c_str(), elapsed, c.seconds, in_time ? "" : " TIMEOUT");
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
