#pragma once

// MOTChallenge text formats and the FCGF feature sidecar.
//
//   det.txt     frame,id,x,y,w,h,conf,a,b,c          (id and trailing fields ignored)
//   gt.txt      frame,id,x,y,w,h,flag,class,visibility (flag 0 rows ignored)
//   result      frame,id,x,y,w,h,score,-1,-1,-1      (2-decimal coords, 4-decimal score)
//
// FCGF sidecar, all integers and floats little-endian:
//   "FCGF" | u32 version (=1) | u32 rows R | u32 dim D | R*D float32, row-major
// Row i holds the feature of the i-th data line of the matching det.txt.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "fcg/appearance.hpp"
#include "fcg/core.hpp"

namespace fcg {

struct SequenceInput {
  std::vector<Detection> detections;  // sorted by (frame, source_row)
  std::string name;
  int fps_ratio_applied = 1;
};

struct FeatureBlob {
  std::uint32_t rows = 0;
  std::uint32_t dim = 0;
  std::vector<float> values;  // rows * dim

  std::span<const float> row(std::size_t i) const { return std::span<const float>(values).subspan(i * dim, dim); }
};

inline constexpr std::array<char, 4> kFeatureMagic = {'F', 'C', 'G', 'F'};
inline constexpr std::uint32_t kFeatureVersion = 1;

namespace detail {

inline std::uint32_t load_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void store_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct CsvLine {
  std::size_t line_no;  // 1-based physical line
  std::vector<std::string_view> fields;
};

/// Non-blank lines split on commas.
inline std::vector<CsvLine> split_csv(std::string_view text) {
  std::vector<CsvLine> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    CsvLine parsed{line_no, {}};
    while (true) {
      const std::size_t comma = line.find(',');
      parsed.fields.push_back(trim(line.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    out.push_back(std::move(parsed));
  }
  return out;
}

inline double parse_real(std::string_view field, std::size_t line_no, const char* what) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw FormatError(std::string("invalid ") + what + " '" + std::string(field) + "'", line_no);
  }
  return v;
}

inline int parse_int(std::string_view field, std::size_t line_no, const char* what) {
  const double v = parse_real(field, line_no, what);
  if (v != std::floor(v) || std::abs(v) > 2.0e9) {
    throw FormatError(std::string(what) + " must be an integer, got '" + std::string(field) + "'", line_no);
  }
  return static_cast<int>(v);
}

inline void require_columns(const CsvLine& l, std::size_t n) {
  if (l.fields.size() < n) {
    throw FormatError("expected at least " + std::to_string(n) + " comma-separated fields, got " +
                          std::to_string(l.fields.size()),
                      l.line_no);
  }
}

inline BBox parse_box(const CsvLine& l) {
  BBox b{parse_real(l.fields[2], l.line_no, "x"), parse_real(l.fields[3], l.line_no, "y"),
         parse_real(l.fields[4], l.line_no, "width"), parse_real(l.fields[5], l.line_no, "height")};
  if (!(b.w > 0.0) || !(b.h > 0.0)) throw FormatError("box width and height must be > 0", l.line_no);
  return b;
}

inline void append_shortest(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void append_fixed(std::string& out, double v, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  out.append(buf, res.ptr);
}

}  // namespace detail

inline FeatureBlob read_feature_blob(std::string_view bytes) {
  constexpr std::size_t header = 16;
  if (bytes.size() < header) throw FormatError("feature blob shorter than its 16-byte header");
  if (!std::equal(kFeatureMagic.begin(), kFeatureMagic.end(), bytes.begin())) {
    throw FormatError("feature blob has bad magic (expected \"FCGF\")");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t version = detail::load_u32_le(p + 4);
  if (version != kFeatureVersion) throw FormatError("unsupported feature blob version " + std::to_string(version));
  FeatureBlob blob;
  blob.rows = detail::load_u32_le(p + 8);
  blob.dim = detail::load_u32_le(p + 12);
  if (blob.dim == 0) throw FormatError("feature blob declares dimension 0");
  const std::uint64_t count = static_cast<std::uint64_t>(blob.rows) * blob.dim;
  if (bytes.size() - header != count * 4) {
    throw FormatError("feature blob payload is " + std::to_string(bytes.size() - header) + " bytes, header implies " +
                      std::to_string(count * 4));
  }
  blob.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    blob.values[i] = std::bit_cast<float>(detail::load_u32_le(p + header + 4 * i));
  }
  return blob;
}

inline std::string write_feature_blob(std::uint32_t rows, std::uint32_t dim, std::span<const float> values) {
  if (values.size() != static_cast<std::size_t>(rows) * dim) {
    throw DimensionError("feature payload size does not match rows * dim");
  }
  std::string out(kFeatureMagic.begin(), kFeatureMagic.end());
  out.reserve(16 + values.size() * 4);
  detail::store_u32_le(out, kFeatureVersion);
  detail::store_u32_le(out, rows);
  detail::store_u32_le(out, dim);
  for (float v : values) detail::store_u32_le(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

/// Parses det.txt plus its feature sidecar; keeps rows with conf >= cfg.score_threshold.
inline SequenceInput parse_detections(std::string_view det_text, std::string_view feature_blob, const FcgConfig& cfg,
                                      std::string name = {}) {
  const auto lines = detail::split_csv(det_text);
  const FeatureBlob blob = read_feature_blob(feature_blob);
  if (lines.size() != blob.rows) {
    throw FormatError("detection file has " + std::to_string(lines.size()) + " rows but feature blob has " +
                      std::to_string(blob.rows));
  }
  if (blob.dim != cfg.feature_dim) {
    throw FormatError("feature blob dimension " + std::to_string(blob.dim) + " does not match configured " +
                      std::to_string(cfg.feature_dim));
  }
  SequenceInput seq;
  seq.name = std::move(name);
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const auto& l = lines[row];
    detail::require_columns(l, 7);
    Detection d;
    d.frame = detail::parse_int(l.fields[0], l.line_no, "frame");
    if (d.frame < 1) throw FormatError("frame index must be >= 1", l.line_no);
    d.bbox = detail::parse_box(l);
    d.score = detail::parse_real(l.fields[6], l.line_no, "confidence");
    if (d.score < 0.0 || d.score > 1.0) throw FormatError("confidence must lie in [0, 1]", l.line_no);
    if (d.score < cfg.score_threshold) continue;
    const auto feat = blob.row(row);
    if (!has_positive_norm(feat)) {
      throw FormatError("feature row " + std::to_string(row) + " has zero or non-finite norm", l.line_no);
    }
    d.feature.assign(feat.begin(), feat.end());
    d.source_row = row;
    seq.detections.push_back(std::move(d));
  }
  std::stable_sort(seq.detections.begin(), seq.detections.end(),
                   [](const Detection& a, const Detection& b) { return a.frame < b.frame; });
  return seq;
}

/// Result file: sorted by (frame, id), 2-decimal coordinates, 4-decimal score.
inline std::string write_tracks(const TrackSet& tracks) {
  std::vector<std::pair<std::pair<int, int>, const TrackPoint*>> rows;
  rows.reserve(tracks.box_count());
  for (const auto& [id, points] : tracks.tracks()) {
    for (const auto& p : points) rows.push_back({{p.frame, id}, &p});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  for (const auto& [key, p] : rows) {
    out += std::to_string(key.first);
    out += ',';
    out += std::to_string(key.second);
    for (double v : {p->bbox.x, p->bbox.y, p->bbox.w, p->bbox.h}) {
      out += ',';
      detail::append_fixed(out, v, 2);
    }
    out += ',';
    detail::append_fixed(out, p->score, 4);
    out += ",-1,-1,-1\n";
  }
  return out;
}

enum class TrackFileKind {
  kGroundTruth,  // column 7 is a consider flag; 0 rows are dropped
  kResult,       // column 7 is a score
};

/// Parses gt.txt or a result file, keeping the file's IDs.
inline TrackSet parse_tracks(std::string_view text, TrackFileKind kind) {
  TrackSet out;
  for (const auto& l : detail::split_csv(text)) {
    detail::require_columns(l, 6);
    const int frame = detail::parse_int(l.fields[0], l.line_no, "frame");
    const int id = detail::parse_int(l.fields[1], l.line_no, "id");
    if (frame < 1) throw FormatError("frame index must be >= 1", l.line_no);
    double score = 1.0;
    if (l.fields.size() > 6) {
      const double col = detail::parse_real(l.fields[6], l.line_no, kind == TrackFileKind::kGroundTruth ? "flag" : "score");
      if (kind == TrackFileKind::kGroundTruth && col == 0.0) continue;
      if (kind == TrackFileKind::kResult) score = col;
    }
    try {
      out.add(id, {frame, detail::parse_box(l), score});
    } catch (const ConstraintViolation&) {
      throw FormatError("duplicate entry for id " + std::to_string(id) + " in frame " + std::to_string(frame),
                        l.line_no);
    }
  }
  return out;
}

inline TrackSet parse_ground_truth(std::string_view gt_text) { return parse_tracks(gt_text, TrackFileKind::kGroundTruth); }

/// gt.txt with flag, class and visibility all 1, coordinates in shortest round-trip form.
inline std::string write_ground_truth(const TrackSet& tracks) {
  std::vector<std::pair<std::pair<int, int>, const TrackPoint*>> rows;
  for (const auto& [id, points] : tracks.tracks()) {
    for (const auto& p : points) rows.push_back({{p.frame, id}, &p});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  for (const auto& [key, p] : rows) {
    out += std::to_string(key.first) + ',' + std::to_string(key.second);
    for (double v : {p->bbox.x, p->bbox.y, p->bbox.w, p->bbox.h}) {
      out += ',';
      detail::append_shortest(out, v);
    }
    out += ",1,1,1\n";
  }
  return out;
}

/// det.txt lines in the given order; values are written so they parse back exactly.
inline std::string write_detections(std::span<const Detection> detections) {
  std::string out;
  for (const Detection& d : detections) {
    out += std::to_string(d.frame);
    out += ",-1";
    for (double v : {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h, d.score}) {
      out += ',';
      detail::append_shortest(out, v);
    }
    out += ",-1,-1,-1\n";
  }
  return out;
}

/// Feature sidecar for `detections`, row i matching the i-th detection.
inline std::string write_detection_features(std::span<const Detection> detections, std::uint32_t dim) {
  std::vector<float> values;
  values.reserve(detections.size() * dim);
  for (const Detection& d : detections) {
    if (d.feature.size() != dim) throw DimensionError("detection feature dimension differs from sidecar dimension");
    values.insert(values.end(), d.feature.begin(), d.feature.end());
  }
  return write_feature_blob(static_cast<std::uint32_t>(detections.size()), dim, values);
}

namespace detail {

inline bool keep_frame(int frame, int ratio) { return (frame - 1) % ratio == 0; }
inline int renumber_frame(int frame, int ratio) { return (frame - 1) / ratio + 1; }

inline void check_ratio(int ratio) {
  if (ratio < 1) throw ConfigError("subsampling ratio must be >= 1");
}

}  // namespace detail

/// Keeps frames f with (f - 1) % ratio == 0 and renumbers them 1, 2, 3, ...
inline SequenceInput subsample(const SequenceInput& seq, int ratio) {
  detail::check_ratio(ratio);
  SequenceInput out;
  out.name = seq.name;
  out.fps_ratio_applied = seq.fps_ratio_applied * ratio;
  for (const Detection& d : seq.detections) {
    if (!detail::keep_frame(d.frame, ratio)) continue;
    Detection kept = d;
    kept.frame = detail::renumber_frame(d.frame, ratio);
    out.detections.push_back(std::move(kept));
  }
  return out;
}

inline TrackSet subsample(const TrackSet& tracks, int ratio) {
  detail::check_ratio(ratio);
  TrackSet out;
  for (const auto& [id, points] : tracks.tracks()) {
    for (TrackPoint p : points) {
      if (!detail::keep_frame(p.frame, ratio)) continue;
      p.frame = detail::renumber_frame(p.frame, ratio);
      out.add(id, p);
    }
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace fcg
