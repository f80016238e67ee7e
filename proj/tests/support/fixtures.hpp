#pragma once

#include "kcone/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#ifndef KCONE_FIXTURE_DIR
#error "KCONE_FIXTURE_DIR must point at the fixtures directory"
#endif

namespace kcone::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(KCONE_FIXTURE_DIR) + "/" + name + ".json";
}

inline TensorFile fixture(const std::string& name) { return load_tensor_file(fixture_path(name)); }

inline std::vector<std::string> fixture_names() {
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(KCONE_FIXTURE_DIR))
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

inline std::vector<TensorFile> all_fixtures() {
  std::vector<TensorFile> out;
  for (const auto& name : fixture_names()) out.push_back(fixture(name));
  return out;
}

inline std::vector<TensorFile> fixtures_of_degree(int n) {
  std::vector<TensorFile> out;
  for (auto& f : all_fixtures())
    if (f.tensor.degree() == n) out.push_back(std::move(f));
  return out;
}

inline Vectord gaussian_vector(int N, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vectord v(N);
  for (int i = 0; i < N; ++i) v[i] = gauss(rng);
  return v;
}

/// Point near a listed Kahler point with Vol > 0 and g positive-definite.
inline Vectord random_kahler_point(const TensorFile& f, std::mt19937_64& rng, double spread = 0.1) {
  const auto& anchors = f.kahler_points;
  std::uniform_int_distribution<std::size_t> pick(0, anchors.size() - 1);
  for (;;) {
    const Vectord& a = anchors[pick(rng)];
    const Vectord t = a + spread * a.norm() / std::sqrt(double(a.size())) * gaussian_vector(int(a.size()), rng);
    if (!(volume(f.tensor, t) > 0.0)) continue;
    if (!is_positive_definite(metric_at(f.tensor, volume_point(t)).g)) continue;
    return t;
  }
}

}  // namespace kcone::testing
