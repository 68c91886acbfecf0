#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <tuple>
#include <vector>

#include "fcg/core.hpp"
#include "fcg/geometry.hpp"

namespace fcg {

/// Minimum-cost assignment on a rows x cols matrix (Hungarian method with
/// potentials, O(n^3) on the padded square). Returns, for each row, the
/// assigned column or -1 when rows > cols leaves it unassigned.
inline std::vector<int> hungarian_min_cost(const std::vector<std::vector<double>>& cost) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows ? cost.front().size() : 0;
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return {};
  auto at = [&](std::size_t i, std::size_t j) { return (i < rows && j < cols) ? cost[i][j] : 0.0; };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; index 0 is the virtual start column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = match[j];
    if (i >= 1 && i <= rows && j <= cols) assignment[i - 1] = static_cast<int>(j - 1);
  }
  return assignment;
}

struct IdentityCounts {
  std::size_t idtp = 0;
  std::size_t idfp = 0;
  std::size_t idfn = 0;

  double idf1() const {
    const std::size_t denom = 2 * idtp + idfp + idfn;
    return denom == 0 ? 1.0 : 2.0 * static_cast<double>(idtp) / static_cast<double>(denom);
  }
};

namespace detail {

struct FrameBox {
  int id;
  BBox box;
};

inline std::map<int, std::vector<FrameBox>> boxes_by_frame(const TrackSet& s) {
  std::map<int, std::vector<FrameBox>> out;
  for (const auto& [id, points] : s.tracks()) {
    for (const auto& p : points) out[p.frame].push_back({id, p.bbox});
  }
  return out;
}

}  // namespace detail

/// Frames in which each (gt id, predicted id) pair overlaps with IoU >= iou_threshold.
/// Indexed [gt index][pred index] in ascending-ID order.
inline std::vector<std::vector<double>> pairwise_overlap_frames(const TrackSet& gt, const TrackSet& pred,
                                                                double iou_threshold) {
  std::map<int, std::size_t> gt_index, pred_index;
  for (const auto& [id, t] : gt.tracks()) gt_index.emplace(id, gt_index.size());
  for (const auto& [id, t] : pred.tracks()) pred_index.emplace(id, pred_index.size());
  std::vector<std::vector<double>> counts(gt_index.size(), std::vector<double>(pred_index.size(), 0.0));
  const auto pred_frames = detail::boxes_by_frame(pred);
  for (const auto& [frame, gboxes] : detail::boxes_by_frame(gt)) {
    const auto it = pred_frames.find(frame);
    if (it == pred_frames.end()) continue;
    for (const auto& g : gboxes) {
      for (const auto& p : it->second) {
        if (iou(g.box, p.box) >= iou_threshold) counts[gt_index[g.id]][pred_index[p.id]] += 1.0;
      }
    }
  }
  return counts;
}

/// Identity true/false positives under the optimal one-to-one GT <-> prediction ID mapping.
inline IdentityCounts identity_counts(const TrackSet& gt, const TrackSet& pred, double iou_threshold = 0.5) {
  const auto counts = pairwise_overlap_frames(gt, pred, iou_threshold);
  IdentityCounts c;
  if (!counts.empty() && !counts.front().empty()) {
    std::vector<std::vector<double>> cost = counts;
    for (auto& row : cost) {
      for (double& v : row) v = -v;
    }
    const auto assignment = hungarian_min_cost(cost);
    for (std::size_t g = 0; g < assignment.size(); ++g) {
      if (assignment[g] >= 0) c.idtp += static_cast<std::size_t>(counts[g][static_cast<std::size_t>(assignment[g])]);
    }
  }
  c.idfn = gt.box_count() - c.idtp;
  c.idfp = pred.box_count() - c.idtp;
  return c;
}

/// 2 IDTP / (2 IDTP + IDFP + IDFN); 1.0 when both sets are empty.
inline double idf1(const TrackSet& gt, const TrackSet& pred, double iou_threshold = 0.5) {
  return identity_counts(gt, pred, iou_threshold).idf1();
}

/// Per frame, greedy one-to-one matching by descending IoU (ties: lower predicted
/// ID, then lower GT ID). Counts matches whose predicted ID differs from the
/// previous predicted ID matched to the same GT identity.
inline std::size_t id_switches(const TrackSet& gt, const TrackSet& pred, double iou_threshold = 0.5) {
  const auto pred_frames = detail::boxes_by_frame(pred);
  std::map<int, int> last_match;
  std::size_t switches = 0;
  for (const auto& [frame, gboxes] : detail::boxes_by_frame(gt)) {
    const auto it = pred_frames.find(frame);
    if (it == pred_frames.end()) continue;
    std::vector<std::tuple<double, int, int>> candidates;  // (iou, pred id, gt id)
    for (const auto& g : gboxes) {
      for (const auto& p : it->second) {
        const double o = iou(g.box, p.box);
        if (o >= iou_threshold) candidates.emplace_back(o, p.id, g.id);
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
      if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
      return std::get<2>(a) < std::get<2>(b);
    });
    std::vector<int> used_gt, used_pred;
    for (const auto& [o, pid, gid] : candidates) {
      if (std::find(used_gt.begin(), used_gt.end(), gid) != used_gt.end()) continue;
      if (std::find(used_pred.begin(), used_pred.end(), pid) != used_pred.end()) continue;
      used_gt.push_back(gid);
      used_pred.push_back(pid);
      const auto prev = last_match.find(gid);
      if (prev != last_match.end() && prev->second != pid) ++switches;
      last_match[gid] = pid;
    }
  }
  return switches;
}

}  // namespace fcg
