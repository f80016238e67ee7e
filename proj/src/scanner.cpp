#include "kcone/scanner.hpp"

#include "kcone/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <thread>

namespace kcone {

namespace {

std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

double g_dot(const Matrixd& g, const Vectord& a, const Vectord& b) { return a.dot(g * b); }

// Gram-Schmidt in the g inner product; drops nearly dependent vectors.
std::vector<Vectord> g_orthonormalize(const Matrixd& g, const std::vector<Vectord>& vs) {
  std::vector<Vectord> out;
  for (const auto& v : vs) {
    Vectord w = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : out) w -= g_dot(g, e, w) * e;
    const double n2 = g_dot(g, w, w);
    if (n2 > 1e-20 * std::max(1e-300, g_dot(g, v, v))) out.push_back(w / std::sqrt(n2));
  }
  return out;
}

std::optional<CurvatureAtPoint<double>> valid_curvature(const IntersectionTensor<double>& c, const Vectord& t) {
  try {
    if (!(volume(c, t) > 0.0)) return std::nullopt;
    return riemann_at(c, kahler_point<double>(t));
  } catch (const GeometryError&) {
    return std::nullopt;
  }
}

template <typename F>
std::pair<double, double> golden_section_max(F f, double a, double b, int iterations) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iterations; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

double sectional_or_lowest(const CurvatureAtPoint<double>& curv, const Vectord& u, const Vectord& v) {
  try {
    return sectional(curv, u, v);
  } catch (const GeometryError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

// Coordinate-wise ascent over rotations of (e1, e2) toward the g-orthogonal
// complement; only improving moves are taken.
PlaneSample optimize_plane(const CurvatureAtPoint<double>& curv, const PlaneSample& start, int sweeps) {
  const Matrixd& g = curv.metric;
  const int N = static_cast<int>(g.rows());
  PlaneSample best = start;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    std::vector<Vectord> seed_vectors = {best.u, best.v};
    for (int i = 0; i < N; ++i) seed_vectors.push_back(Vectord::Unit(N, i));
    const auto basis = g_orthonormalize(g, seed_vectors);
    if (basis.size() < 2) break;
    Vectord e1 = basis[0], e2 = basis[1];
    for (std::size_t k = 2; k < basis.size(); ++k) {
      const Vectord& f = basis[k];
      for (int which = 0; which < 2; ++which) {
        auto rotated = [&](double theta) {
          const Vectord& moving = which == 0 ? e1 : e2;
          return Vectord(std::cos(theta) * moving + std::sin(theta) * f);
        };
        auto objective = [&](double theta) {
          return which == 0 ? sectional_or_lowest(curv, rotated(theta), e2)
                            : sectional_or_lowest(curv, e1, rotated(theta));
        };
        const auto [theta, value] = golden_section_max(objective, -std::numbers::pi / 2, std::numbers::pi / 2, 60);
        if (value > best.k) {
          (which == 0 ? e1 : e2) = rotated(theta);
          const auto ortho = g_orthonormalize(g, {e1, e2});
          if (ortho.size() < 2) continue;
          e1 = ortho[0];
          e2 = ortho[1];
          const double k_value = sectional(curv, e1, e2);
          if (k_value > best.k) {
            best.u = e1;
            best.v = e2;
            best.k = k_value;
            best.sample_index = -1;
          }
        }
      }
    }
  }
  return best;
}

}  // namespace

std::pair<Vectord, Vectord> random_plane(const Matrixd& g, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  const int N = static_cast<int>(g.rows());
  for (;;) {
    Vectord a(N), b(N);
    for (int i = 0; i < N; ++i) a[i] = gauss(rng);
    for (int i = 0; i < N; ++i) b[i] = gauss(rng);
    const auto basis = g_orthonormalize(g, {a, b});
    if (basis.size() == 2) return {basis[0], basis[1]};
  }
}

std::vector<Vectord> sample_cone_points(const IntersectionTensor<double>& c, std::span<const Vectord> anchors,
                                        int count, double spread, std::uint64_t seed,
                                        bool require_positive_definite) {
  std::vector<Vectord> out;
  if (anchors.empty()) return out;
  const int N = c.rank();
  std::normal_distribution<double> gauss;
  for (int i = 0; i < count; ++i) {
    const Vectord& anchor = anchors[i % anchors.size()];
    auto rng = keyed_engine(seed, static_cast<std::uint64_t>(i), 0x5a17u);
    for (int attempt = 0; attempt < 100; ++attempt) {
      Vectord noise(N);
      for (int j = 0; j < N; ++j) noise[j] = gauss(rng);
      const Vectord t = anchor + spread * anchor.norm() / std::sqrt(double(N)) * noise;
      const double vol = volume(c, t);
      if (!(vol > 0.0)) continue;
      if (require_positive_definite && !is_positive_definite(metric_at(c, volume_point<double>(t)).g)) continue;
      out.push_back(t);
      break;
    }
  }
  return out;
}

ScanReport scan_sectional(const IntersectionTensor<double>& c, std::span<const Vectord> points,
                          const ScanOptions& options, std::string tensor_id) {
  if (c.rank() < 2) throw GeometryError(ErrorKind::NoValidPoints, "rank-1 tensors have no tangent 2-planes");
  if (options.planes_per_point < 1)
    throw GeometryError(ErrorKind::InvalidArgument, "planes_per_point must be positive");

  ScanReport report;
  report.tensor_id = std::move(tensor_id);

  std::vector<CurvatureAtPoint<double>> curvatures;
  for (const auto& t : points) {
    if (t.size() != c.rank()) throw GeometryError(ErrorKind::DimensionMismatch, "scan point has wrong dimension");
    if (auto curv = valid_curvature(c, t)) {
      report.points.push_back(t);
      curvatures.push_back(std::move(*curv));
    } else {
      ++report.skipped_points;
    }
  }
  if (curvatures.empty()) throw GeometryError(ErrorKind::NoValidPoints, "no sampled point has Vol > 0 and g > 0");

  const int P = options.planes_per_point;
  const int point_count = static_cast<int>(curvatures.size());
  report.samples.resize(static_cast<std::size_t>(point_count) * P);

  auto work = [&](int first, int last) {
    for (int p = first; p < last; ++p) {
      auto rng = keyed_engine(options.seed, static_cast<std::uint64_t>(p), 0xc0ffeeu);
      for (int j = 0; j < P; ++j) {
        auto [u, v] = random_plane(curvatures[p].metric, rng);
        const double k = sectional(curvatures[p], u, v);
        report.samples[static_cast<std::size_t>(p) * P + j] = PlaneSample{p, j, std::move(u), std::move(v), k};
      }
    }
  };
  const int threads = std::clamp(options.threads, 1, point_count);
  if (threads == 1) {
    work(0, point_count);
  } else {
    std::vector<std::jthread> pool;
    const int chunk = (point_count + threads - 1) / threads;
    for (int first = 0; first < point_count; first += chunk)
      pool.emplace_back(work, first, std::min(point_count, first + chunk));
  }

  // Ordered reduction keeps the first attaining sample on ties.
  const PlaneSample* lo = &report.samples.front();
  const PlaneSample* hi = &report.samples.front();
  for (const auto& s : report.samples) {
    if (s.k < lo->k) lo = &s;
    if (s.k > hi->k) hi = &s;
  }
  report.min_plane = *lo;
  report.max_plane = *hi;
  report.k_min = lo->k;
  report.k_max = report.raw_k_max = hi->k;

  const int bins = std::max(1, options.histogram_bins);
  report.histogram = {report.k_min, report.k_max, std::vector<int>(bins, 0)};
  const double width = (report.k_max - report.k_min) / bins;
  for (const auto& s : report.samples) {
    int b = width > 0.0 ? static_cast<int>((s.k - report.k_min) / width) : 0;
    report.histogram.counts[std::clamp(b, 0, bins - 1)]++;
  }

  if (options.optimize) {
    std::vector<std::size_t> order(report.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t starts = std::min<std::size_t>(std::max(0, options.optimize_starts), order.size());
    std::partial_sort(order.begin(), order.begin() + starts, order.end(), [&](std::size_t a, std::size_t b) {
      return report.samples[a].k > report.samples[b].k || (report.samples[a].k == report.samples[b].k && a < b);
    });
    for (std::size_t i = 0; i < starts; ++i) {
      const auto& start = report.samples[order[i]];
      const auto refined = optimize_plane(curvatures[start.point_index], start, options.optimize_sweeps);
      if (refined.k > report.max_plane.k) report.max_plane = refined;
    }
    report.k_max = report.max_plane.k;
  }

  int pd = 0;
  for (std::size_t p = 0; p < curvatures.size(); ++p) {
    const auto sig = signature_of(curvatures[p].metric);
    pd += sig.positive == c.rank();
    report.signature.push_back({report.points[p], sig});
  }
  report.positive_definite_fraction = double(pd) / double(curvatures.size());
  return report;
}

ScanReport signature_profile(const IntersectionTensor<double>& c, std::span<const Vectord> points,
                             std::string tensor_id) {
  ScanReport report;
  report.tensor_id = std::move(tensor_id);
  int pd = 0;
  for (const auto& t : points) {
    if (!(volume(c, t) > 0.0)) {
      ++report.skipped_points;
      continue;
    }
    const auto sig = signature_of(metric_at(c, volume_point<double>(t)).g);
    pd += sig.positive == c.rank();
    report.points.push_back(t);
    report.signature.push_back({t, sig});
  }
  report.positive_definite_fraction = report.signature.empty() ? 0.0 : double(pd) / double(report.signature.size());
  return report;
}

}  // namespace kcone
