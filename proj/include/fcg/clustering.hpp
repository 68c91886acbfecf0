#pragma once

// Constrained UPGMA (average linkage) over a condensed distance matrix.
//
// Clusters are indexed by creation order: leaves 0..n-1, then n, n+1, ... for
// each merge, as in the usual linkage-matrix convention. At every step the
// admissible pair with the smallest current distance is merged; ties go to the
// lexicographically smallest (a, b) with a < b. After merging K and L the
// distance to any other cluster M is the size-weighted mean
//   (|K| d(K,M) + |L| d(L,M)) / (|K| + |L|),
// which equals the mean over all item pairs. Cannot-link partners are inherited
// by the merged cluster, and a pair that is cannot-linked is never merged.
// Matrix entries at or above kCannotLink are treated as cannot-link as well.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <functional>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fcg/core.hpp"
#include "fcg/weighting.hpp"

namespace fcg {

/// Upper triangle of a symmetric distance matrix, row-major.
class CondensedMatrix {
 public:
  CondensedMatrix() = default;
  explicit CondensedMatrix(std::size_t n) : n_(n), values_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}
  CondensedMatrix(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {
    if (values_.size() != (n < 2 ? 0 : n * (n - 1) / 2)) {
      throw DimensionError("condensed matrix of " + std::to_string(n) + " items needs " +
                           std::to_string(n < 2 ? 0 : n * (n - 1) / 2) + " values, got " +
                           std::to_string(values_.size()));
    }
    for (double v : values_) {
      if (!(v >= 0.0)) throw ConfigError("condensed matrix entries must be non-negative numbers");
    }
  }

  std::size_t size() const noexcept { return n_; }
  std::span<const double> values() const noexcept { return values_; }

  double at(std::size_t i, std::size_t j) const { return values_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, double v) { values_[index(i, j)] = v; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return n_ * i - i * (i + 1) / 2 + (j - i - 1);
  }

  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Unordered item pairs that may never share a cluster.
class ConstraintSet {
 public:
  void add(std::size_t i, std::size_t j) {
    if (i == j) throw ConstraintViolation("an item cannot be cannot-linked with itself");
    pairs_.emplace(std::min(i, j), std::max(i, j));
  }
  bool contains(std::size_t i, std::size_t j) const {
    return pairs_.contains({std::min(i, j), std::max(i, j)});
  }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const std::set<std::pair<std::size_t, std::size_t>>& pairs() const noexcept { return pairs_; }

 private:
  std::set<std::pair<std::size_t, std::size_t>> pairs_;
};

struct Merge {
  std::size_t a = 0;  // a < b, cluster indices
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;

  friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;

  friend bool operator==(const Dendrogram&, const Dendrogram&) = default;
};

/// Clusters of item indices; members ascending, clusters ordered by smallest member.
using Partition = std::vector<std::vector<std::size_t>>;

inline Dendrogram linkage(const CondensedMatrix& matrix, const ConstraintSet& constraints = {}) {
  const std::size_t n = matrix.size();
  Dendrogram out;
  out.leaves = n;
  if (n < 2) return out;

  // Slot-indexed working state; a merged cluster reuses the slot of its first input.
  std::vector<double> dist(n * n, 0.0);
  std::vector<char> blocked(n * n, 0);
  std::vector<std::size_t> slot_id(n);
  std::vector<std::size_t> slot_size(n, 1);
  std::vector<char> slot_live(n, 1);
  std::vector<std::size_t> id_slot(2 * n - 1, 0);
  std::vector<char> id_live(2 * n - 1, 0);

  for (std::size_t i = 0; i < n; ++i) {
    slot_id[i] = i;
    id_slot[i] = i;
    id_live[i] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = matrix.at(i, j);
      dist[i * n + j] = dist[j * n + i] = d;
      if (d >= kCannotLink) blocked[i * n + j] = blocked[j * n + i] = 1;
    }
  }
  for (const auto& [i, j] : constraints.pairs()) {
    if (j >= n) throw ConstraintViolation("cannot-link index out of range");
    blocked[i * n + j] = blocked[j * n + i] = 1;
  }

  struct Candidate {
    double d;
    std::size_t a;
    std::size_t b;
    bool operator>(const Candidate& o) const {
      if (d != o.d) return d > o.d;
      if (a != o.a) return a > o.a;
      return b > o.b;
    }
  };
  std::vector<Candidate> seed;
  seed.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!blocked[i * n + j]) seed.push_back({dist[i * n + j], i, j});
    }
  }
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap(std::greater<>{},
                                                                             std::move(seed));

  while (!heap.empty()) {
    const Candidate top = heap.top();
    heap.pop();
    if (!id_live[top.a] || !id_live[top.b]) continue;

    const std::size_t sa = id_slot[top.a];
    const std::size_t sb = id_slot[top.b];
    const double na = static_cast<double>(slot_size[sa]);
    const double nb = static_cast<double>(slot_size[sb]);
    const std::size_t new_id = n + out.merges.size();
    out.merges.push_back({top.a, top.b, top.d, slot_size[sa] + slot_size[sb]});

    id_live[top.a] = id_live[top.b] = 0;
    id_live[new_id] = 1;
    id_slot[new_id] = sa;
    slot_id[sa] = new_id;
    slot_size[sa] += slot_size[sb];
    slot_live[sb] = 0;

    for (std::size_t m = 0; m < n; ++m) {
      if (!slot_live[m] || m == sa) continue;
      const bool cl = blocked[sa * n + m] || blocked[sb * n + m];
      blocked[sa * n + m] = blocked[m * n + sa] = cl ? 1 : 0;
      if (cl) continue;
      const double dam = dist[sa * n + m];
      const double dbm = dist[sb * n + m];
      // The mean lies between its inputs; the clamp only absorbs rounding.
      const double d = std::clamp((na * dam + nb * dbm) / (na + nb), std::min(dam, dbm), std::max(dam, dbm));
      dist[sa * n + m] = dist[m * n + sa] = d;
      heap.push({d, slot_id[m], new_id});
    }
  }
  return out;
}

/// Applies every merge with height <= threshold.
inline Partition cut(const Dendrogram& dendrogram, double threshold) {
  const std::size_t n = dendrogram.leaves;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::size_t> rep(n + dendrogram.merges.size());
  std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(n), std::size_t{0});
  for (std::size_t k = 0; k < dendrogram.merges.size(); ++k) {
    const Merge& m = dendrogram.merges[k];
    if (m.height > threshold) break;  // heights are nondecreasing
    const std::size_t ra = find(rep[m.a]);
    const std::size_t rb = find(rep[m.b]);
    parent[std::max(ra, rb)] = std::min(ra, rb);
    rep[n + k] = std::min(ra, rb);
  }

  Partition out;
  std::vector<std::size_t> root_cluster(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (root_cluster[r] == n) {
      root_cluster[r] = out.size();
      out.emplace_back();
    }
    out[root_cluster[r]].push_back(i);
  }
  return out;
}

/// Fills a condensed matrix with metric(items[i], items[j]) for i < j.
template <typename T, typename Metric>
CondensedMatrix pairwise_matrix(std::span<const T> items, Metric&& metric) {
  CondensedMatrix m(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      m.set(i, j, std::invoke(metric, items[i], items[j]));
    }
  }
  return m;
}

/// cut(linkage(pairwise_matrix(items, metric), constraints), threshold).
/// When `trace` is non-null the dendrogram is copied into it.
template <typename T, typename Metric>
Partition cluster(std::span<const T> items, Metric&& metric, const ConstraintSet& constraints, double threshold,
                  Dendrogram* trace = nullptr) {
  if (!(threshold > 0.0) || threshold >= kCannotLink) {
    throw ConfigError("cut threshold must lie in (0, " + std::to_string(kCannotLink) + ")");
  }
  Dendrogram d = linkage(pairwise_matrix(items, std::forward<Metric>(metric)), constraints);
  Partition p = cut(d, threshold);
  if (trace) *trace = std::move(d);
  return p;
}

/// Debug dump, one "merge <a> <b> <height> <size>" line per merge.
inline void write_dendrogram(std::ostream& os, const Dendrogram& d) {
  char buf[64];
  for (const Merge& m : d.merges) {
    auto res = std::to_chars(buf, buf + sizeof buf, m.height);
    os << "merge " << m.a << ' ' << m.b << ' ' << std::string_view(buf, res.ptr - buf) << ' ' << m.size << '\n';
  }
}

}  // namespace fcg
