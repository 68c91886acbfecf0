#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcg {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// A cannot-link or frame-disjointness rule would be broken.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Zero-norm appearance feature; cosine distance is undefined for it.
class DegenerateFeatureError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data. `line()` is 1-based, 0 when not tied to a line.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Axis-aligned box in pixels, top-left anchored.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;

  double left() const noexcept { return x; }
  double top() const noexcept { return y; }
  double right() const noexcept { return x + w; }
  double bottom() const noexcept { return y + h; }
  double area() const noexcept { return w * h; }
  bool valid() const noexcept { return w > 0.0 && h > 0.0 && std::isfinite(x) && std::isfinite(y); }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// One object instance in one frame.
struct Detection {
  int frame = 1;  // 1-based
  BBox bbox;
  double score = 1.0;
  std::vector<float> feature;
  std::size_t source_row = 0;  // data-line index in the originating file
};

/// Frame-disjoint group of detections with a cached element-wise median feature.
class Tracklet {
 public:
  const std::vector<Detection>& detections() const noexcept { return detections_; }
  const std::vector<double>& median_feature() const noexcept { return median_; }
  std::size_t size() const noexcept { return detections_.size(); }
  int first_frame() const noexcept { return detections_.front().frame; }
  int last_frame() const noexcept { return detections_.back().frame; }
  const Detection& front() const noexcept { return detections_.front(); }
  const Detection& back() const noexcept { return detections_.back(); }

  bool has_frame(int frame) const {
    auto it = std::lower_bound(detections_.begin(), detections_.end(), frame,
                               [](const Detection& d, int f) { return d.frame < f; });
    return it != detections_.end() && it->frame == frame;
  }

  /// True when both tracklets contain a detection in a common frame.
  bool shares_frame_with(const Tracklet& other) const {
    auto a = detections_.begin();
    auto b = other.detections_.begin();
    while (a != detections_.end() && b != other.detections_.end()) {
      if (a->frame == b->frame) return true;
      if (a->frame < b->frame) {
        ++a;
      } else {
        ++b;
      }
    }
    return false;
  }

 private:
  friend Tracklet tracklet_new(std::vector<Detection> detections);
  std::vector<Detection> detections_;
  std::vector<double> median_;
};

/// Element-wise median of equally sized rows. Even counts use the mean of the two middle values.
template <typename Row>
std::vector<double> elementwise_median(std::span<const Row> rows) {
  if (rows.empty()) throw EmptyInputError("median of an empty set");
  const std::size_t dim = rows.front().size();
  std::vector<double> out(dim);
  std::vector<double> column(rows.size());
  const std::size_t mid = rows.size() / 2;
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) column[r] = static_cast<double>(rows[r][c]);
    std::nth_element(column.begin(), column.begin() + mid, column.end());
    const double upper = column[mid];
    if (rows.size() % 2 == 1) {
      out[c] = upper;
    } else {
      const double lower = *std::max_element(column.begin(), column.begin() + mid);
      out[c] = (lower + upper) / 2.0;
    }
  }
  return out;
}

/// Builds a tracklet; detections are ordered by frame (then source_row) and the
/// median feature is computed over all members.
inline Tracklet tracklet_new(std::vector<Detection> detections) {
  if (detections.empty()) throw EmptyInputError("tracklet requires at least one detection");
  const std::size_t dim = detections.front().feature.size();
  for (const auto& d : detections) {
    if (d.feature.size() != dim) {
      throw DimensionError("tracklet members have different feature dimensions (" +
                           std::to_string(dim) + " vs " + std::to_string(d.feature.size()) + ")");
    }
  }
  std::sort(detections.begin(), detections.end(), [](const Detection& a, const Detection& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.source_row < b.source_row;
  });
  for (std::size_t i = 1; i < detections.size(); ++i) {
    if (detections[i].frame == detections[i - 1].frame) {
      throw ConstraintViolation("two detections in frame " + std::to_string(detections[i].frame) +
                                " (rows " + std::to_string(detections[i - 1].source_row) + ", " +
                                std::to_string(detections[i].source_row) + ") in one tracklet");
    }
  }
  std::vector<std::span<const float>> rows;
  rows.reserve(detections.size());
  for (const auto& d : detections) rows.emplace_back(d.feature);

  Tracklet t;
  t.median_ = elementwise_median<std::span<const float>>(rows);
  t.detections_ = std::move(detections);
  return t;
}

/// Tracklets covering window indices [span_start, span_end) at one hierarchy level.
struct LiftedFrame {
  int level = 1;
  int span_start = 0;
  int span_end = 1;
  std::vector<Tracklet> tracklets;
};

/// Every tunable of the tracker. Defaults are the published constants.
struct FcgConfig {
  int window = 6;
  double tracklet_threshold = 0.055;
  double track_threshold = 0.055;
  double kt = 40.0;  // frames
  double ct = 4.0;
  double off = 0.15;
  double kf = 2.0;
  double cf = 2.0;
  double score_threshold = 0.7;
  bool use_temporal = true;
  bool use_spatial = true;
  bool use_motion = true;
  bool consecutive = true;
  std::size_t feature_dim = 2048;
  // Cap on constant-velocity extrapolation steps across a gap; 0 means `window`.
  int motion_max_steps = 0;

  int motion_step_cap() const noexcept { return motion_max_steps > 0 ? motion_max_steps : window; }

  void validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (window < 1) fail("window must be >= 1");
    if (!(tracklet_threshold > 0.0)) fail("tracklet threshold must be > 0");
    if (!(track_threshold > 0.0)) fail("track threshold must be > 0");
    if (tracklet_threshold >= 1.0e6 || track_threshold >= 1.0e6) fail("thresholds must stay below the cannot-link sentinel");
    if (!(kt >= 0.0)) fail("K_T must be >= 0");
    if (!(ct >= 1.0)) fail("c_T must be >= 1");
    if (!(off > 0.0 && off <= 1.0)) fail("off must lie in (0, 1]");
    if (!(kf >= 0.0)) fail("K_F must be >= 0");
    if (!(cf >= 1.0)) fail("c_F must be >= 1");
    if (!(score_threshold >= 0.0 && score_threshold <= 1.0)) fail("score threshold must lie in [0, 1]");
    if (feature_dim < 1) fail("feature dimension must be >= 1");
    if (motion_max_steps < 0) fail("motion step cap must be >= 0");
  }
};

struct TrackPoint {
  int frame = 1;
  BBox bbox;
  double score = 1.0;

  friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

/// Labeled tracks; each track holds at most one box per frame, in frame order.
class TrackSet {
 public:
  using Map = std::map<int, std::vector<TrackPoint>>;

  /// Inserts keeping frame order; a second box for the same (id, frame) is an error.
  void add(int id, const TrackPoint& p) {
    auto& track = tracks_[id];
    auto it = std::lower_bound(track.begin(), track.end(), p.frame,
                               [](const TrackPoint& q, int f) { return q.frame < f; });
    if (it != track.end() && it->frame == p.frame) {
      throw ConstraintViolation("track " + std::to_string(id) + " has two boxes in frame " +
                                std::to_string(p.frame));
    }
    track.insert(it, p);
  }

  const Map& tracks() const noexcept { return tracks_; }
  bool empty() const noexcept { return tracks_.empty(); }
  std::size_t track_count() const noexcept { return tracks_.size(); }

  std::size_t box_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [id, t] : tracks_) n += t.size();
    return n;
  }

  friend bool operator==(const TrackSet&, const TrackSet&) = default;

 private:
  Map tracks_;
};

}  // namespace fcg
