#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fcg/core.hpp"
#include "fcg/io_mot.hpp"

namespace fcg {

enum class MotionModel { kLinear, kSinusoidal };

struct Occlusion {
  int identity = 0;  // 0-based
  int start_frame = 1;
  int end_frame = 1;  // inclusive
};

struct Exit {
  int identity = 0;
  int exit_frame = 1;  // last emitted frame
};

struct SynthConfig {
  int num_identities = 1;
  int num_frames = 1;
  std::size_t feature_dim = 2048;
  double feature_noise_sigma = 0.0;
  MotionModel motion_model = MotionModel::kLinear;
  std::vector<Occlusion> occlusions;
  std::vector<Exit> exits;
  double arena_width = 1920.0;
  double arena_height = 1080.0;
  double box_width = 50.0;
  double box_height = 100.0;
  double min_speed = 0.5;  // px/frame, per axis
  double max_speed = 3.0;
  std::uint64_t seed = 0;
};

struct SynthSequence {
  SequenceInput input;
  TrackSet ground_truth;  // IDs are identity + 1
};

namespace synth {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Engine keyed by (seed, identity, frame); frame 0 is the per-identity track stream.
inline std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t identity, std::uint64_t frame) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ (identity + 0x632BE59BD9B4E019ull));
  k = splitmix64(k ^ (frame + 0x8CB92BA72F3D8DD7ull));
  return std::mt19937_64(k);
}

/// Folds an unbounded coordinate into [0, span] by reflecting at both walls.
inline double reflect(double v, double span) {
  if (span <= 0.0) return 0.0;
  const double period = 2.0 * span;
  double m = std::fmod(v, period);
  if (m < 0.0) m += period;
  return m <= span ? m : period - m;
}

/// `prototype` plus N(0, sigma^2) per component, scaled to unit norm.
inline std::vector<float> noisy_unit_feature(const std::vector<double>& prototype, double sigma, std::mt19937_64& rng) {
  std::vector<double> v = prototype;
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& c : v) c += noise(rng);
  }
  double norm = 0.0;
  for (double c : v) norm += c * c;
  norm = std::sqrt(norm);
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / norm);
  return out;
}

struct IdentityTrack {
  double x0, y0, vx, vy;
  double amplitude, period, phase;
};

inline IdentityTrack draw_track(const SynthConfig& cfg, int identity) {
  auto rng = keyed_engine(cfg.seed, static_cast<std::uint64_t>(identity), 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double span_x = cfg.arena_width - cfg.box_width;
  const double span_y = cfg.arena_height - cfg.box_height;
  auto velocity = [&] {
    const double speed = cfg.min_speed + (cfg.max_speed - cfg.min_speed) * unit(rng);
    return unit(rng) < 0.5 ? -speed : speed;
  };
  IdentityTrack t{};
  t.x0 = span_x * unit(rng);
  t.y0 = span_y * unit(rng);
  t.vx = velocity();
  t.vy = velocity();
  t.amplitude = std::min(20.0 + 60.0 * unit(rng), span_y / 2.0);
  t.period = 30.0 + 90.0 * unit(rng);
  t.phase = 2.0 * std::numbers::pi * unit(rng);
  return t;
}

inline BBox box_at(const SynthConfig& cfg, const IdentityTrack& t, int frame) {
  const double dt = frame - 1;
  const double span_x = cfg.arena_width - cfg.box_width;
  const double span_y = cfg.arena_height - cfg.box_height;
  BBox b{0.0, 0.0, cfg.box_width, cfg.box_height};
  b.x = reflect(t.x0 + t.vx * dt, span_x);
  if (cfg.motion_model == MotionModel::kLinear) {
    b.y = reflect(t.y0 + t.vy * dt, span_y);
  } else {
    const double centre = std::clamp(t.y0, t.amplitude, span_y - t.amplitude);
    b.y = reflect(centre + t.amplitude * std::sin(2.0 * std::numbers::pi * dt / t.period + t.phase), span_y);
  }
  return b;
}

inline void validate(const SynthConfig& cfg) {
  auto fail = [](const std::string& m) { throw ConfigError("synth: " + m); };
  if (cfg.num_identities < 1) fail("num_identities must be >= 1");
  if (cfg.num_frames < 1) fail("num_frames must be >= 1");
  if (cfg.feature_dim < 1) fail("feature_dim must be >= 1");
  if (static_cast<std::size_t>(cfg.num_identities) > cfg.feature_dim) fail("num_identities must not exceed feature_dim");
  if (!(cfg.feature_noise_sigma >= 0.0)) fail("feature_noise_sigma must be >= 0");
  if (!(cfg.box_width > 0.0 && cfg.box_height > 0.0)) fail("box size must be positive");
  if (cfg.arena_width < cfg.box_width || cfg.arena_height < cfg.box_height) fail("arena smaller than the box");
  if (!(cfg.min_speed >= 0.0 && cfg.max_speed >= cfg.min_speed)) fail("speed range invalid");
  for (const auto& o : cfg.occlusions) {
    if (o.identity < 0 || o.identity >= cfg.num_identities) fail("occlusion identity out of range");
    if (o.start_frame < 1 || o.end_frame > cfg.num_frames || o.start_frame > o.end_frame) {
      fail("occlusion range must lie within [1, num_frames]");
    }
  }
  for (const auto& e : cfg.exits) {
    if (e.identity < 0 || e.identity >= cfg.num_identities) fail("exit identity out of range");
    if (e.exit_frame < 1 || e.exit_frame > cfg.num_frames) fail("exit frame must lie within [1, num_frames]");
  }
}

inline bool visible(const SynthConfig& cfg, int identity, int frame) {
  for (const auto& o : cfg.occlusions) {
    if (o.identity == identity && frame >= o.start_frame && frame <= o.end_frame) return false;
  }
  for (const auto& e : cfg.exits) {
    if (e.identity == identity && frame > e.exit_frame) return false;
  }
  return true;
}

}  // namespace synth

/// Deterministic scene: identity k has prototype e_k; every emitted detection
/// gets a noisy unit feature drawn from a stream keyed by (seed, k, frame).
inline SynthSequence generate(const SynthConfig& cfg) {
  synth::validate(cfg);
  std::vector<synth::IdentityTrack> tracks;
  for (int k = 0; k < cfg.num_identities; ++k) tracks.push_back(synth::draw_track(cfg, k));

  SynthSequence out;
  out.input.name = "synth-" + std::to_string(cfg.seed);
  std::vector<double> prototype(cfg.feature_dim, 0.0);
  std::size_t row = 0;
  for (int frame = 1; frame <= cfg.num_frames; ++frame) {
    for (int k = 0; k < cfg.num_identities; ++k) {
      if (!synth::visible(cfg, k, frame)) continue;
      Detection d;
      d.frame = frame;
      d.bbox = synth::box_at(cfg, tracks[static_cast<std::size_t>(k)], frame);
      d.score = 1.0;
      d.source_row = row++;
      prototype[static_cast<std::size_t>(k)] = 1.0;
      auto rng = synth::keyed_engine(cfg.seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(frame));
      d.feature = synth::noisy_unit_feature(prototype, cfg.feature_noise_sigma, rng);
      prototype[static_cast<std::size_t>(k)] = 0.0;
      out.ground_truth.add(k + 1, {frame, d.bbox, 1.0});
      out.input.detections.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace fcg
