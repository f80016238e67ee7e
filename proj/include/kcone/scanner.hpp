#pragma once

#include "kcone/cone_metric.hpp"
#include "kcone/intersection_tensor.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kcone {

struct PlaneSample {
  int point_index = -1;
  /// position within the point's planes; -1 for planes produced by the optimizer
  int sample_index = -1;
  Vectord u;
  Vectord v;
  double k = 0.0;
};

struct Histogram {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<int> counts;
};

struct SignatureEntry {
  Vectord point;
  Signature signature;
};

struct ScanOptions {
  int planes_per_point = 100;
  bool optimize = false;
  std::uint64_t seed = 0;
  int threads = 1;
  /// number of best raw samples the optimizer starts from
  int optimize_starts = 4;
  int optimize_sweeps = 3;
  int histogram_bins = 20;
};

struct ScanReport {
  std::string tensor_id;
  std::vector<Vectord> points;
  int skipped_points = 0;
  std::vector<PlaneSample> samples;
  double k_min = 0.0;
  double k_max = 0.0;
  /// best value among raw samples, before optimization
  double raw_k_max = 0.0;
  PlaneSample min_plane;
  PlaneSample max_plane;
  Histogram histogram;
  std::vector<SignatureEntry> signature;
  double positive_definite_fraction = 0.0;
};

/// Gaussian pair made orthonormal in the g inner product.
std::pair<Vectord, Vectord> random_plane(const Matrixd& g, std::mt19937_64& rng);

/// Perturbs the anchors additively (relative size `spread`) and keeps points
/// with Vol > 0, and g positive-definite when require_positive_definite.
/// Point i depends only on (seed, i).
std::vector<Vectord> sample_cone_points(const IntersectionTensor<double>& c, std::span<const Vectord> anchors,
                                        int count, double spread, std::uint64_t seed,
                                        bool require_positive_definite);

/// Samples sectional curvature over random 2-planes at each valid point
/// (Vol > 0, g positive-definite); invalid points are skipped. With
/// options.optimize, coordinate-wise golden-section search over plane
/// rotations refines the largest values. The report is identical for any
/// thread count.
ScanReport scan_sectional(const IntersectionTensor<double>& c, std::span<const Vectord> points,
                          const ScanOptions& options, std::string tensor_id = {});

/// Eigenvalue signature of g at each Vol-positive point.
ScanReport signature_profile(const IntersectionTensor<double>& c, std::span<const Vectord> points,
                             std::string tensor_id = {});

}  // namespace kcone
