#pragma once

#include <algorithm>
#include <cmath>

#include "fcg/core.hpp"

namespace fcg {

/// 1 - IoU. Disjoint boxes give exactly 1, identical boxes exactly 0.
inline double iou_distance(const BBox& a, const BBox& b) noexcept {
  if (a == b) return 0.0;
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 1.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(1.0 - inter / uni, 0.0, 1.0);
}

inline double iou(const BBox& a, const BBox& b) noexcept { return 1.0 - iou_distance(a, b); }

/// Size-normalized displacement: mean of the top-left and bottom-right corner
/// distances, x differences scaled by the mean width and y by the mean height.
inline double box_displacement(const BBox& a, const BBox& b) noexcept {
  const double mean_w = (a.w + b.w) / 2.0;
  const double mean_h = (a.h + b.h) / 2.0;
  const double d1 = std::hypot((a.left() - b.left()) / mean_w, (a.top() - b.top()) / mean_h);
  const double d2 = std::hypot((a.right() - b.right()) / mean_w, (a.bottom() - b.bottom()) / mean_h);
  return (d1 + d2) / 2.0;
}

namespace detail {

inline double extrapolate_size(double prev, double curr, double factor) noexcept {
  const double v = curr + factor * (curr - prev);
  return std::max(v, std::min(1.0, curr));
}

}  // namespace detail

/// Constant-velocity displacement of `curr` by `factor` times the (prev -> curr)
/// delta. Width and height are extrapolated too and clamped to at least 1 px.
inline BBox extrapolate_by(const BBox& prev, const BBox& curr, double factor) noexcept {
  BBox out;
  out.x = curr.x + factor * (curr.x - prev.x);
  out.y = curr.y + factor * (curr.y - prev.y);
  out.w = detail::extrapolate_size(prev.w, curr.w, factor);
  out.h = detail::extrapolate_size(prev.h, curr.h, factor);
  return out;
}

/// `extrapolate_by` with an integral number of steps (steps >= 1).
inline BBox extrapolate(const BBox& prev, const BBox& curr, int steps) noexcept {
  return extrapolate_by(prev, curr, static_cast<double>(steps));
}

}  // namespace fcg
