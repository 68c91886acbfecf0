#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <type_traits>

#include "fcg/core.hpp"

namespace fcg {

/// 1 - cos(angle) between two appearance vectors, in [0, 2].
///
/// Accumulates in double regardless of the element type. Symmetric bit-for-bit,
/// and cosine_distance(h, h) is exactly 0.
template <typename A, typename B>
  requires std::is_arithmetic_v<A> && std::is_arithmetic_v<B>
double cosine_distance(std::span<const A> h1, std::span<const B> h2) {
  if (h1.size() != h2.size()) {
    throw DimensionError("feature dimension mismatch: " + std::to_string(h1.size()) + " vs " +
                         std::to_string(h2.size()));
  }
  double dot = 0.0;
  double n1 = 0.0;
  double n2 = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    const double a = static_cast<double>(h1[i]);
    const double b = static_cast<double>(h2[i]);
    dot += a * b;
    n1 += a * a;
    n2 += b * b;
  }
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw DegenerateFeatureError("zero-norm feature vector");
  return std::clamp(1.0 - dot / std::sqrt(n1 * n2), 0.0, 2.0);
}

template <typename A, typename B>
double cosine_distance(const std::vector<A>& h1, const std::vector<B>& h2) {
  return cosine_distance(std::span<const A>(h1), std::span<const B>(h2));
}

inline double detection_distance(const Detection& a, const Detection& b) {
  return cosine_distance(a.feature, b.feature);
}

/// Cosine distance between the cached median features.
inline double tracklet_distance(const Tracklet& t1, const Tracklet& t2) {
  return cosine_distance(t1.median_feature(), t2.median_feature());
}

/// Squared-norm check used at ingestion.
template <typename T>
bool has_positive_norm(std::span<const T> h) {
  double n = 0.0;
  for (T v : h) n += static_cast<double>(v) * static_cast<double>(v);
  return n > 0.0 && std::isfinite(n);
}

}  // namespace fcg
