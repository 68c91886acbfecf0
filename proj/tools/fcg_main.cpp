// fcg: command-line front end.
//
//   fcg track     --det det.txt --features feats.fcgf --out res.txt [config flags]
//   fcg synth     --identities 5 --frames 120 --sigma 0.05 --seed 7 --out-dir d/
//   fcg eval      --gt gt.txt --pred res.txt
//   fcg subsample --det det.txt --features feats.fcgf --ratio 5 --out-dir d/ [--gt gt.txt]
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fcg/fcg.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_config_flags(CLI::App& cmd, fcg::FcgConfig& cfg, bool& no_temporal, bool& no_spatial, bool& motion,
                      bool& no_motion, bool& non_consecutive) {
  cmd.add_option("--window", cfg.window, "Frames per stage-1 window")->capture_default_str();
  cmd.add_option("--tracklet-threshold", cfg.tracklet_threshold, "Stage-1 cut height")->capture_default_str();
  cmd.add_option("--track-threshold", cfg.track_threshold, "Stage-2 cut height")->capture_default_str();
  cmd.add_option("--kt", cfg.kt, "Temporal gap (frames) beyond which c_T applies")->capture_default_str();
  cmd.add_option("--ct", cfg.ct, "Temporal penalty factor")->capture_default_str();
  cmd.add_option("--off", cfg.off, "Offset added to the IoU distance")->capture_default_str();
  cmd.add_option("--kf", cfg.kf, "Normalized displacement beyond which c_F applies")->capture_default_str();
  cmd.add_option("--cf", cfg.cf, "Far-object penalty factor")->capture_default_str();
  cmd.add_option("--score-threshold", cfg.score_threshold, "Minimum detection confidence")->capture_default_str();
  cmd.add_option("--feature-dim", cfg.feature_dim, "Appearance feature dimension")->capture_default_str();
  cmd.add_option("--motion-max-steps", cfg.motion_max_steps, "Extrapolation step cap (0 = window)")
      ->capture_default_str();
  cmd.add_flag("--no-temporal", no_temporal, "Disable temporal weighting");
  cmd.add_flag("--no-spatial", no_spatial, "Disable spatial weighting");
  auto* m = cmd.add_flag("--motion", motion, "Enable constant-velocity motion (default)");
  cmd.add_flag("--no-motion", no_motion, "Disable constant-velocity motion")->excludes(m);
  cmd.add_flag("--non-consecutive", non_consecutive, "Cluster all tracklets globally without priors");
}

void apply_toggles(fcg::FcgConfig& cfg, bool no_temporal, bool no_spatial, bool no_motion, bool non_consecutive) {
  cfg.use_temporal = !no_temporal;
  cfg.use_spatial = !no_spatial;
  cfg.use_motion = !no_motion;
  cfg.consecutive = !non_consecutive;
}

std::pair<int, int> parse_pair(const std::string& s, const char* what) {
  const auto colon = s.find(':');
  auto to_int = [&](std::string_view v) {
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw UsageError(std::string("malformed ") + what + " '" + s + "'");
    return out;
  };
  if (colon == std::string::npos) throw UsageError(std::string("malformed ") + what + " '" + s + "'");
  return {to_int(std::string_view(s).substr(0, colon)), to_int(std::string_view(s).substr(colon + 1))};
}

// "ID:START-END", 1-based ID.
fcg::Occlusion parse_occlusion(const std::string& s) {
  const auto colon = s.find(':');
  const auto dash = s.find('-', colon == std::string::npos ? 0 : colon);
  if (colon == std::string::npos || dash == std::string::npos) throw UsageError("malformed --occlude '" + s + "'");
  const auto [id, start] = parse_pair(s.substr(0, dash), "--occlude");
  const auto [unused, end] = parse_pair("0:" + s.substr(dash + 1), "--occlude");
  (void)unused;
  return {id - 1, start, end};
}

// Prefixes data errors with the file they came from.
template <typename Fn>
auto with_file(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const fcg::FormatError& e) {
    throw fcg::FormatError(path + ": " + e.what());
  } catch (const fcg::ConfigError&) {
    throw;
  } catch (const fcg::Error& e) {
    throw fcg::Error(path + ": " + e.what());
  }
}

std::string format_metric(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  return std::string(buf, res.ptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Appearance-driven multi-object tracking by hierarchical clustering"};
  app.require_subcommand(1);

  // track
  fcg::FcgConfig track_cfg;
  std::string det_path, feat_path, out_path, dendro_path;
  unsigned threads = 1;
  bool no_temporal = false, no_spatial = false, motion = false, no_motion = false, non_consecutive = false;
  auto* track = app.add_subcommand("track", "Track detections and write a MOTChallenge result file");
  track->add_option("--det", det_path, "det.txt")->required();
  track->add_option("--features", feat_path, "FCGF feature sidecar")->required();
  track->add_option("--out", out_path, "Result file")->required();
  track->add_option("--threads", threads, "Worker threads (0 = auto)")->capture_default_str();
  track->add_option("--dump-dendrograms", dendro_path, "Write every dendrogram to this file");
  add_config_flags(*track, track_cfg, no_temporal, no_spatial, motion, no_motion, non_consecutive);

  // synth
  fcg::SynthConfig synth_cfg;
  std::string synth_dir, motion_model = "linear";
  std::vector<std::string> occlusions, exits;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence with ground truth");
  synth->add_option("--identities", synth_cfg.num_identities)->required();
  synth->add_option("--frames", synth_cfg.num_frames)->required();
  synth->add_option("--sigma", synth_cfg.feature_noise_sigma, "Per-component feature noise")->capture_default_str();
  synth->add_option("--seed", synth_cfg.seed)->capture_default_str();
  synth->add_option("--feature-dim", synth_cfg.feature_dim)->capture_default_str();
  synth->add_option("--motion-model", motion_model)->check(CLI::IsMember({"linear", "sinusoidal"}))->capture_default_str();
  synth->add_option("--occlude", occlusions, "ID:START-END occlusion, 1-based ID (repeatable)");
  synth->add_option("--exit", exits, "ID:FRAME last visible frame, 1-based ID (repeatable)");
  synth->add_option("--arena-width", synth_cfg.arena_width)->capture_default_str();
  synth->add_option("--arena-height", synth_cfg.arena_height)->capture_default_str();
  synth->add_option("--out-dir", synth_dir)->required();

  // eval
  std::string gt_path, pred_path;
  double iou_threshold = 0.5;
  auto* eval = app.add_subcommand("eval", "Compute IDF1 and ID switches against ground truth");
  eval->add_option("--gt", gt_path)->required();
  eval->add_option("--pred", pred_path)->required();
  eval->add_option("--iou-threshold", iou_threshold)->check(CLI::Range(0.0, 1.0))->capture_default_str();

  // subsample
  fcg::FcgConfig sub_cfg;
  std::string sub_det, sub_feat, sub_gt, sub_dir;
  int ratio = 1;
  auto* sub = app.add_subcommand("subsample", "Keep every r-th frame and renumber frames");
  sub->add_option("--det", sub_det)->required();
  sub->add_option("--features", sub_feat)->required();
  sub->add_option("--gt", sub_gt, "Optional gt.txt to subsample alongside");
  sub->add_option("--ratio", ratio)->required()->check(CLI::PositiveNumber);
  sub->add_option("--out-dir", sub_dir)->required();
  sub->add_option("--score-threshold", sub_cfg.score_threshold)->capture_default_str();
  sub->add_option("--feature-dim", sub_cfg.feature_dim)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*track) {
      apply_toggles(track_cfg, no_temporal, no_spatial, no_motion, non_consecutive);
      track_cfg.validate();
      const auto seq = with_file(det_path, [&] {
        return fcg::parse_detections(fcg::read_file(det_path), fcg::read_file(feat_path), track_cfg,
                                     fs::path(det_path).stem().string());
      });
      fcg::RunTrace trace;
      const auto tracks = fcg::run(seq.detections, track_cfg, {threads}, dendro_path.empty() ? nullptr : &trace);
      fcg::write_file(out_path, fcg::write_tracks(tracks));
      if (!dendro_path.empty()) {
        std::ostringstream os;
        for (const auto& e : trace.entries) {
          os << "# " << e.label << '\n';
          fcg::write_dendrogram(os, e.dendrogram);
        }
        fcg::write_file(dendro_path, os.str());
      }
    } else if (*synth) {
      synth_cfg.motion_model = motion_model == "linear" ? fcg::MotionModel::kLinear : fcg::MotionModel::kSinusoidal;
      for (const auto& o : occlusions) synth_cfg.occlusions.push_back(parse_occlusion(o));
      for (const auto& e : exits) {
        const auto [id, frame] = parse_pair(e, "--exit");
        synth_cfg.exits.push_back({id - 1, frame});
      }
      const auto scene = fcg::generate(synth_cfg);
      fs::create_directories(synth_dir);
      const auto& dets = scene.input.detections;
      fcg::write_file(fs::path(synth_dir) / "det.txt", fcg::write_detections(dets));
      fcg::write_file(fs::path(synth_dir) / "feats.fcgf",
                      fcg::write_detection_features(dets, static_cast<std::uint32_t>(synth_cfg.feature_dim)));
      fcg::write_file(fs::path(synth_dir) / "gt.txt", fcg::write_ground_truth(scene.ground_truth));
    } else if (*eval) {
      const auto gt = with_file(gt_path, [&] { return fcg::parse_ground_truth(fcg::read_file(gt_path)); });
      const auto pred = with_file(pred_path, [&] {
        return fcg::parse_tracks(fcg::read_file(pred_path), fcg::TrackFileKind::kResult);
      });
      std::cout << "idf1," << format_metric(fcg::idf1(gt, pred, iou_threshold)) << '\n'
                << "id_switches," << fcg::id_switches(gt, pred, iou_threshold) << '\n';
    } else if (*sub) {
      sub_cfg.validate();
      const auto seq = with_file(sub_det, [&] {
        return fcg::parse_detections(fcg::read_file(sub_det), fcg::read_file(sub_feat), sub_cfg);
      });
      const auto kept = fcg::subsample(seq, ratio);
      fs::create_directories(sub_dir);
      fcg::write_file(fs::path(sub_dir) / "det.txt", fcg::write_detections(kept.detections));
      fcg::write_file(fs::path(sub_dir) / "feats.fcgf",
                      fcg::write_detection_features(kept.detections, static_cast<std::uint32_t>(sub_cfg.feature_dim)));
      if (!sub_gt.empty()) {
        const auto gt = with_file(sub_gt, [&] { return fcg::subsample(fcg::parse_ground_truth(fcg::read_file(sub_gt)), ratio); });
        fcg::write_file(fs::path(sub_dir) / "gt.txt", fcg::write_ground_truth(gt));
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "fcg: " << e.what() << '\n';
    return kUsageError;
  } catch (const fcg::ConfigError& e) {
    std::cerr << "fcg: " << e.what() << '\n';
    return kUsageError;
  } catch (const fcg::Error& e) {
    std::cerr << "fcg: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "fcg: " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
