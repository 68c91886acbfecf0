#pragma once

#include <algorithm>
#include <optional>
#include <utility>

#include "fcg/appearance.hpp"
#include "fcg/core.hpp"
#include "fcg/geometry.hpp"

namespace fcg {

/// Distance assigned to pairs that must never share a cluster. It is larger
/// than any admissible cut threshold.
inline constexpr double kCannotLink = 1.0e6;

/// Endpoint geometry of a temporally ordered tracklet pair.
struct PairContext {
  BBox last_box_k;   // last box of the earlier tracklet (possibly extrapolated)
  BBox first_box_q;  // first box of the later tracklet
  int delta_t = 1;   // first frame of later minus last frame of earlier
};

struct SpatialWeights {
  double lambda_c = 1.0;
  double lambda_f = 1.0;
};

/// 1 while the gap is within K_T frames, c_T beyond it.
inline double temporal_weight(double delta_t, const FcgConfig& cfg) noexcept {
  return delta_t <= cfg.kt ? 1.0 : cfg.ct;
}

inline SpatialWeights spatial_weights(const PairContext& ctx, const FcgConfig& cfg) noexcept {
  SpatialWeights w;
  w.lambda_c = std::min(1.0, iou_distance(ctx.last_box_k, ctx.first_box_q) + cfg.off);
  w.lambda_f = box_displacement(ctx.last_box_k, ctx.first_box_q) <= cfg.kf ? 1.0 : cfg.cf;
  return w;
}

/// Orders the pair so the first element ends strictly before the second begins.
/// Returns nullopt when the time ranges interleave or touch.
inline std::optional<std::pair<const Tracklet*, const Tracklet*>> temporal_order(const Tracklet& a,
                                                                                 const Tracklet& b) {
  if (a.last_frame() < b.first_frame()) return std::pair{&a, &b};
  if (b.last_frame() < a.first_frame()) return std::pair{&b, &a};
  return std::nullopt;
}

/// Box at the end of `t`, advanced by constant velocity toward a frame `delta_t`
/// ahead. Velocity comes from the last two detections, normalized per frame; the
/// number of steps is capped at cfg.motion_step_cap().
inline BBox motion_end_box(const Tracklet& t, int delta_t, const FcgConfig& cfg) {
  const Detection& curr = t.back();
  if (t.size() < 2) return curr.bbox;
  const Detection& prev = t.detections()[t.size() - 2];
  const int gap = curr.frame - prev.frame;
  const int steps = std::min(delta_t, cfg.motion_step_cap());
  return extrapolate_by(prev.bbox, curr.bbox, static_cast<double>(steps) / gap);
}

inline PairContext pair_context(const Tracklet& earlier, const Tracklet& later, const FcgConfig& cfg) {
  PairContext ctx;
  ctx.delta_t = later.first_frame() - earlier.last_frame();
  ctx.first_box_q = later.front().bbox;
  ctx.last_box_k = cfg.use_motion ? motion_end_box(earlier, ctx.delta_t, cfg) : earlier.back().bbox;
  return ctx;
}

/// Appearance distance scaled by the enabled temporal and spatial priors.
/// Pairs whose time ranges overlap get kCannotLink.
inline double weighted_distance(const Tracklet& t1, const Tracklet& t2, const FcgConfig& cfg) {
  const auto ordered = temporal_order(t1, t2);
  if (!ordered) return kCannotLink;
  double d = tracklet_distance(t1, t2);
  if (!cfg.use_temporal && !cfg.use_spatial) return d;

  const auto [earlier, later] = *ordered;
  const PairContext ctx = pair_context(*earlier, *later, cfg);
  if (cfg.use_temporal) d *= temporal_weight(ctx.delta_t, cfg);
  if (cfg.use_spatial) {
    const SpatialWeights w = spatial_weights(ctx, cfg);
    d *= w.lambda_c * w.lambda_f;
  }
  return d;
}

}  // namespace fcg
