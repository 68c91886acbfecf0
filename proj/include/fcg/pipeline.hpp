#pragma once

// Two-stage tracking by clustering.
//
// Stage 1 clusters the detections of each non-overlapping window of
// `cfg.window` frames into tracklets (cosine distance, same-frame pairs
// cannot-linked). Each window becomes a level-1 lifted frame spanning window
// indices [n, n+1). Stage 2 repeatedly fuses adjacent lifted frames pairwise
// (1st+2nd, 3rd+4th, ...; an odd last frame is carried up) by clustering the
// union of their tracklets under the weighted tracklet distance, until one
// lifted frame spans [0, N). Its tracklets are the output tracks.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fcg/appearance.hpp"
#include "fcg/clustering.hpp"
#include "fcg/core.hpp"
#include "fcg/detail/parallel.hpp"
#include "fcg/weighting.hpp"

namespace fcg {

struct RunOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
};

/// Optional record of every clustering run, in a schedule-independent order.
struct RunTrace {
  struct Entry {
    std::string label;
    Dendrogram dendrogram;
  };
  std::vector<Entry> entries;
};

namespace detail {

inline void validate_detections(std::span<const Detection> detections, const FcgConfig& cfg) {
  for (const Detection& d : detections) {
    const std::string where = "detection at row " + std::to_string(d.source_row);
    if (d.frame < 1) throw FormatError(where + ": frame index must be >= 1");
    if (!d.bbox.valid()) throw FormatError(where + ": box width and height must be > 0");
    if (d.feature.size() != cfg.feature_dim) {
      throw DimensionError(where + ": feature has " + std::to_string(d.feature.size()) +
                           " components, expected " + std::to_string(cfg.feature_dim));
    }
    if (!has_positive_norm(std::span<const float>(d.feature))) {
      throw DegenerateFeatureError(where + ": feature vector has zero norm");
    }
  }
}

/// No detection in two tracklets, and every detection inside the frame's span.
inline void check_lifted_frame(const LiftedFrame& f, int window) {
  const int first = f.span_start * window + 1;
  const int last = f.span_end * window;
  std::vector<std::pair<int, std::size_t>> seen;
  for (const Tracklet& t : f.tracklets) {
    for (const Detection& d : t.detections()) {
      if (d.frame < first || d.frame > last) {
        throw ConstraintViolation("detection at row " + std::to_string(d.source_row) + " (frame " +
                                  std::to_string(d.frame) + ") lies outside lifted frame [" +
                                  std::to_string(f.span_start) + ", " + std::to_string(f.span_end) + ")");
      }
      seen.emplace_back(d.frame, d.source_row);
    }
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw ConstraintViolation("lifted frame [" + std::to_string(f.span_start) + ", " + std::to_string(f.span_end) +
                              ") holds one detection in two tracklets");
  }
}

inline LiftedFrame cluster_tracklets(std::vector<Tracklet> tracklets, const FcgConfig& cfg, int level,
                                     int span_start, int span_end, Dendrogram* trace) {
  ConstraintSet constraints;
  for (std::size_t i = 0; i < tracklets.size(); ++i) {
    for (std::size_t j = i + 1; j < tracklets.size(); ++j) {
      if (tracklets[i].shares_frame_with(tracklets[j])) constraints.add(i, j);
    }
  }
  const Partition parts = cluster(
      std::span<const Tracklet>(tracklets),
      [&cfg](const Tracklet& a, const Tracklet& b) { return weighted_distance(a, b, cfg); }, constraints,
      cfg.track_threshold, trace);

  LiftedFrame out;
  out.level = level;
  out.span_start = span_start;
  out.span_end = span_end;
  out.tracklets.reserve(parts.size());
  for (const auto& members : parts) {
    if (members.size() == 1) {
      out.tracklets.push_back(std::move(tracklets[members.front()]));
      continue;
    }
    std::vector<Detection> merged;
    for (std::size_t idx : members) {
      const auto& dets = tracklets[idx].detections();
      merged.insert(merged.end(), dets.begin(), dets.end());
    }
    out.tracklets.push_back(tracklet_new(std::move(merged)));
  }
  return out;
}

}  // namespace detail

/// Number of windows needed to cover frames 1..last_frame.
inline int window_count(int last_frame, int window) { return last_frame <= 0 ? 0 : (last_frame + window - 1) / window; }

/// Stage 1. Returns one level-1 lifted frame per window, including empty windows.
inline std::vector<LiftedFrame> generate_tracklets(std::span<const Detection> detections, const FcgConfig& cfg,
                                                   const RunOptions& opts = {}, RunTrace* trace = nullptr) {
  cfg.validate();
  detail::validate_detections(detections, cfg);
  if (detections.empty()) return {};

  int last_frame = 0;
  for (const Detection& d : detections) last_frame = std::max(last_frame, d.frame);
  const int n_windows = window_count(last_frame, cfg.window);

  std::vector<std::vector<Detection>> buckets(static_cast<std::size_t>(n_windows));
  for (const Detection& d : detections) buckets[static_cast<std::size_t>((d.frame - 1) / cfg.window)].push_back(d);
  for (auto& b : buckets) {
    std::sort(b.begin(), b.end(), [](const Detection& x, const Detection& y) {
      return x.frame != y.frame ? x.frame < y.frame : x.source_row < y.source_row;
    });
  }

  std::vector<LiftedFrame> frames(buckets.size());
  std::vector<Dendrogram> dendrograms(trace ? buckets.size() : 0);
  detail::parallel_for(buckets.size(), opts.threads, [&](std::size_t w) {
    const auto& dets = buckets[w];
    ConstraintSet same_frame;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      for (std::size_t j = i + 1; j < dets.size() && dets[j].frame == dets[i].frame; ++j) same_frame.add(i, j);
    }
    const Partition parts = cluster(std::span<const Detection>(dets), detection_distance, same_frame,
                                    cfg.tracklet_threshold, trace ? &dendrograms[w] : nullptr);
    LiftedFrame& f = frames[w];
    f.level = 1;
    f.span_start = static_cast<int>(w);
    f.span_end = static_cast<int>(w) + 1;
    f.tracklets.reserve(parts.size());
    for (const auto& members : parts) {
      std::vector<Detection> group;
      group.reserve(members.size());
      for (std::size_t idx : members) group.push_back(dets[idx]);
      f.tracklets.push_back(tracklet_new(std::move(group)));
    }
  });
  if (trace) {
    for (std::size_t w = 0; w < dendrograms.size(); ++w) {
      trace->entries.push_back({"window " + std::to_string(w), std::move(dendrograms[w])});
    }
  }
  return frames;
}

/// Stage 2 step: clusters the union of the tracklets of `a` and `b`.
/// In consecutive mode `a` must end no later than `b` starts.
inline LiftedFrame fuse_lifted_frames(const LiftedFrame& a, const LiftedFrame& b, const FcgConfig& cfg,
                                      Dendrogram* trace = nullptr) {
  if (cfg.consecutive && a.span_end > b.span_start) {
    throw ConstraintViolation("consecutive fusion requires span [" + std::to_string(a.span_start) + ", " +
                              std::to_string(a.span_end) + ") to precede [" + std::to_string(b.span_start) +
                              ", " + std::to_string(b.span_end) + ")");
  }
  detail::check_lifted_frame(a, cfg.window);
  detail::check_lifted_frame(b, cfg.window);
  std::vector<Tracklet> all;
  all.reserve(a.tracklets.size() + b.tracklets.size());
  all.insert(all.end(), a.tracklets.begin(), a.tracklets.end());
  all.insert(all.end(), b.tracklets.begin(), b.tracklets.end());
  return detail::cluster_tracklets(std::move(all), cfg, std::max(a.level, b.level) + 1,
                                   std::min(a.span_start, b.span_start), std::max(a.span_end, b.span_end), trace);
}

/// One balanced reduction round over adjacent pairs; an odd last frame is
/// carried up to the next level unchanged apart from its level.
inline std::vector<LiftedFrame> reduce_level(const std::vector<LiftedFrame>& frames, const FcgConfig& cfg,
                                             const RunOptions& opts = {}, RunTrace* trace = nullptr) {
  const std::size_t pairs = frames.size() / 2;
  std::vector<LiftedFrame> next(pairs + frames.size() % 2);
  std::vector<Dendrogram> dendrograms(trace ? pairs : 0);
  detail::parallel_for(pairs, opts.threads, [&](std::size_t p) {
    next[p] = fuse_lifted_frames(frames[2 * p], frames[2 * p + 1], cfg, trace ? &dendrograms[p] : nullptr);
  });
  if (frames.size() % 2 == 1) {
    next.back() = frames.back();
    next.back().level += 1;
  }
  if (trace) {
    for (std::size_t p = 0; p < pairs; ++p) {
      const LiftedFrame& f = next[p];
      trace->entries.push_back({"level " + std::to_string(f.level) + " [" + std::to_string(f.span_start) + ", " +
                                    std::to_string(f.span_end) + ")",
                                std::move(dendrograms[p])});
    }
  }
  return next;
}

/// Final tracks: IDs 1.. ordered by first frame, then by source_row of the
/// first detection.
inline TrackSet to_track_set(const std::vector<Tracklet>& tracklets) {
  std::vector<const Tracklet*> order;
  order.reserve(tracklets.size());
  for (const Tracklet& t : tracklets) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const Tracklet* a, const Tracklet* b) {
    if (a->first_frame() != b->first_frame()) return a->first_frame() < b->first_frame();
    return a->front().source_row < b->front().source_row;
  });
  TrackSet out;
  int id = 1;
  for (const Tracklet* t : order) {
    for (const Detection& d : t->detections()) out.add(id, {d.frame, d.bbox, d.score});
    ++id;
  }
  return out;
}

/// Full tracker. Output is independent of opts.threads.
inline TrackSet run(std::span<const Detection> detections, const FcgConfig& cfg, const RunOptions& opts = {},
                    RunTrace* trace = nullptr) {
  std::vector<LiftedFrame> frames = generate_tracklets(detections, cfg, opts, trace);
  if (frames.empty()) return {};

  if (!cfg.consecutive && frames.size() > 1) {
    // Global clustering of all stage-1 tracklets; spatio-temporal priors need
    // the consecutive schedule, so they are switched off here.
    FcgConfig plain = cfg;
    plain.use_temporal = plain.use_spatial = plain.use_motion = false;
    std::vector<Tracklet> all;
    for (auto& f : frames) {
      for (auto& t : f.tracklets) all.push_back(std::move(t));
    }
    Dendrogram d;
    const int n = static_cast<int>(frames.size());
    LiftedFrame top = detail::cluster_tracklets(std::move(all), plain, 2, 0, n, trace ? &d : nullptr);
    if (trace) trace->entries.push_back({"global [0, " + std::to_string(n) + ")", std::move(d)});
    return to_track_set(top.tracklets);
  }

  while (frames.size() > 1) frames = reduce_level(frames, cfg, opts, trace);
  return to_track_set(frames.front().tracklets);
}

}  // namespace fcg
