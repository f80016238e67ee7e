#pragma once

#include "kcone/types.hpp"

#include <unsupported/Eigen/CXX11/Tensor>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace kcone {

template <typename Scalar>
using Array3 = Eigen::Tensor<Scalar, 3>;

template <typename Scalar>
using Array4 = Eigen::Tensor<Scalar, 4>;

template <typename Scalar>
constexpr Scalar factorial(int k) {
  Scalar f(1);
  for (int i = 2; i <= k; ++i) f *= Scalar(i);
  return f;
}

/// Symmetric degree-n multilinear form on R^N, stored over sorted multi-indices.
///
/// The stored value at a sorted multi-index (i1 <= ... <= in) is the component
/// c_{i1..in} of the fully symmetric tensor, so c(x1, ..., xn) sums that value
/// over every distinct ordering of the multi-index. These orderings are
/// expanded once at construction; contractions walk the expanded term list.
template <typename Scalar>
class IntersectionTensor {
 public:
  struct Entry {
    std::vector<int> index;
    Scalar value;
  };

  /// Entries must be on sorted, in-range, pairwise distinct multi-indices with
  /// finite values, at least one nonzero. Unsorted indices are rejected.
  IntersectionTensor(int degree, int rank, std::vector<Entry> entries)
      : degree_(degree), rank_(rank), entries_(std::move(entries)) {
    if (degree_ < 1) throw GeometryError(ErrorKind::InvalidTensor, "degree must be >= 1");
    if (rank_ < 1) throw GeometryError(ErrorKind::InvalidTensor, "rank must be >= 1");
    bool any_nonzero = false;
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      const auto& idx = entries_[e].index;
      const std::string where = "entry " + std::to_string(e);
      if (static_cast<int>(idx.size()) != degree_)
        throw GeometryError(ErrorKind::InvalidTensor, where + ": multi-index length differs from degree");
      for (int i : idx)
        if (i < 0 || i >= rank_) throw GeometryError(ErrorKind::InvalidTensor, where + ": index out of range");
      if (!std::is_sorted(idx.begin(), idx.end()))
        throw GeometryError(ErrorKind::InvalidTensor, where + ": multi-index is not sorted");
      if (!std::isfinite(static_cast<double>(entries_[e].value)))
        throw GeometryError(ErrorKind::InvalidTensor, where + ": value is not finite");
      any_nonzero = any_nonzero || entries_[e].value != Scalar(0);
    }
    if (!any_nonzero) throw GeometryError(ErrorKind::InvalidTensor, "all entries are zero");

    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    for (std::size_t e = 1; e < entries_.size(); ++e)
      if (entries_[e].index == entries_[e - 1].index)
        throw GeometryError(ErrorKind::InvalidTensor, "duplicate multi-index");

    for (const auto& entry : entries_) {
      std::vector<int> perm = entry.index;
      do {
        term_indices_.insert(term_indices_.end(), perm.begin(), perm.end());
        term_values_.push_back(entry.value);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }

  int degree() const noexcept { return degree_; }
  int rank() const noexcept { return rank_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  Scalar max_abs_entry() const noexcept {
    Scalar m(0);
    for (const auto& e : entries_) m = std::max(m, Scalar(std::abs(e.value)));
    return m;
  }

  std::size_t term_count() const noexcept { return term_values_.size(); }
  std::span<const int> term_index(std::size_t k) const noexcept {
    return {term_indices_.data() + k * degree_, static_cast<std::size_t>(degree_)};
  }
  Scalar term_value(std::size_t k) const noexcept { return term_values_[k]; }

  template <typename Other>
  IntersectionTensor<Other> cast() const {
    std::vector<typename IntersectionTensor<Other>::Entry> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back({e.index, static_cast<Other>(e.value)});
    return IntersectionTensor<Other>(degree_, rank_, std::move(out));
  }

 private:
  int degree_;
  int rank_;
  std::vector<Entry> entries_;
  std::vector<int> term_indices_;
  std::vector<Scalar> term_values_;
};

namespace detail {

template <typename Scalar>
void check_dimension(const IntersectionTensor<Scalar>& c, const Vector<Scalar>& x, const char* what) {
  if (x.size() != c.rank())
    throw GeometryError(ErrorKind::DimensionMismatch,
                        std::string(what) + " has dimension " + std::to_string(x.size()) +
                            ", tensor rank is " + std::to_string(c.rank()));
}

}  // namespace detail

/// P_k(v1..vk; t) = c(v1, ..., vk, t, ..., t) / (n - k)!
template <typename Scalar>
Scalar contract(const IntersectionTensor<Scalar>& c, std::span<const Vector<Scalar>> vs,
                const Vector<Scalar>& t) {
  const int n = c.degree();
  const int k = static_cast<int>(vs.size());
  if (k > n)
    throw GeometryError(ErrorKind::DimensionMismatch, "more vectors than the tensor degree");
  detail::check_dimension(c, t, "base point");
  for (const auto& v : vs) detail::check_dimension(c, v, "tangent vector");

  std::vector<const Scalar*> slots(n);
  for (int m = 0; m < n; ++m) slots[m] = m < k ? vs[m].data() : t.data();

  Scalar sum(0);
  for (std::size_t term = 0; term < c.term_count(); ++term) {
    const auto idx = c.term_index(term);
    Scalar prod = c.term_value(term);
    for (int m = 0; m < n; ++m) prod *= slots[m][idx[m]];
    sum += prod;
  }
  return sum / factorial<Scalar>(n - k);
}

template <typename Scalar>
Scalar contract(const IntersectionTensor<Scalar>& c, std::initializer_list<Vector<Scalar>> vs,
                const Vector<Scalar>& t) {
  return contract(c, std::span<const Vector<Scalar>>(vs.begin(), vs.size()), t);
}

/// Vol(t) = c(t, ..., t) / n!
template <typename Scalar>
Scalar volume(const IntersectionTensor<Scalar>& c, const Vector<Scalar>& t) {
  return contract(c, std::span<const Vector<Scalar>>{}, t);
}

/// Partial derivatives of the volume polynomial,
/// V_{i1..ik} = c(e_i1, ..., e_ik, t, ..., t) / (n - k)!.
/// Arrays above the requested order are left empty; arrays of order greater
/// than n are allocated and identically zero.
template <typename Scalar>
struct VolumeDerivatives {
  int order = 0;
  Scalar value{0};
  Vector<Scalar> first;
  Matrix<Scalar> second;
  Array3<Scalar> third;
  Array4<Scalar> fourth;
};

template <typename Scalar>
VolumeDerivatives<Scalar> vol_derivatives(const IntersectionTensor<Scalar>& c,
                                          const Vector<Scalar>& t, int order) {
  if (order < 1 || order > 4)
    throw GeometryError(ErrorKind::InvalidArgument, "derivative order must be in 1..4");
  detail::check_dimension(c, t, "base point");
  const int n = c.degree();
  const int N = c.rank();

  VolumeDerivatives<Scalar> d;
  d.order = order;
  d.first = Vector<Scalar>::Zero(N);
  d.second = Matrix<Scalar>::Zero(N, N);
  if (order >= 3) {
    d.third.resize(N, N, N);
    d.third.setZero();
  }
  if (order >= 4) {
    d.fourth.resize(N, N, N, N);
    d.fourth.setZero();
  }

  // tail[k] = product of t over slots k..n-1
  std::vector<Scalar> tail(n + 1);
  std::vector<Scalar> inv_fact(n + 1);
  for (int k = 0; k <= n; ++k) inv_fact[k] = Scalar(1) / factorial<Scalar>(n - k);

  for (std::size_t term = 0; term < c.term_count(); ++term) {
    const auto idx = c.term_index(term);
    const Scalar value = c.term_value(term);
    tail[n] = Scalar(1);
    for (int m = n - 1; m >= 0; --m) tail[m] = tail[m + 1] * t[idx[m]];

    d.value += value * tail[0] * inv_fact[0];
    if (n >= 1) d.first[idx[0]] += value * tail[1] * inv_fact[1];
    if (order >= 2 && n >= 2) d.second(idx[0], idx[1]) += value * tail[2] * inv_fact[2];
    if (order >= 3 && n >= 3) d.third(idx[0], idx[1], idx[2]) += value * tail[3] * inv_fact[3];
    if (order >= 4 && n >= 4)
      d.fourth(idx[0], idx[1], idx[2], idx[3]) += value * tail[4] * inv_fact[4];
  }
  return d;
}

}  // namespace kcone
