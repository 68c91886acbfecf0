#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fcg/core.hpp"
#include "oracles.hpp"

namespace fcg {
namespace {

Detection det(int frame, std::vector<float> feature, std::size_t row = 0) {
  Detection d;
  d.frame = frame;
  d.bbox = {0, 0, 10, 10};
  d.feature = std::move(feature);
  d.source_row = row;
  return d;
}

TEST(TrackletNew, SingleDetectionMedianIsItsFeature) {
  const Tracklet t = tracklet_new({det(1, {0.6f, 0.8f})});
  ASSERT_EQ(t.median_feature().size(), 2u);
  EXPECT_DOUBLE_EQ(t.median_feature()[0], static_cast<double>(0.6f));
  EXPECT_DOUBLE_EQ(t.median_feature()[1], static_cast<double>(0.8f));
}

TEST(TrackletNew, OddCountMedian) {
  const Tracklet t = tracklet_new({det(1, {0, 1}), det(2, {1, 0}), det(3, {1, 1})});
  EXPECT_EQ(t.median_feature(), (std::vector<double>{1.0, 1.0}));
}

TEST(TrackletNew, EvenCountMedianAveragesMiddlePair) {
  const Tracklet t = tracklet_new({det(4, {0, 0}), det(9, {2, 4})});
  EXPECT_EQ(t.median_feature(), (std::vector<double>{1.0, 2.0}));
}

TEST(TrackletNew, SortsByFrameAndAllowsGaps) {
  const Tracklet t = tracklet_new({det(7, {1, 0}), det(2, {1, 0}), det(4, {1, 0})});
  EXPECT_EQ(t.first_frame(), 2);
  EXPECT_EQ(t.last_frame(), 7);
  EXPECT_TRUE(t.has_frame(4));
  EXPECT_FALSE(t.has_frame(5));
}

TEST(TrackletNew, Errors) {
  EXPECT_THROW(tracklet_new({}), EmptyInputError);
  EXPECT_THROW(tracklet_new({det(3, {1, 0}), det(3, {0, 1})}), ConstraintViolation);
  EXPECT_THROW(tracklet_new({det(1, {1, 0}), det(2, {0, 1, 0})}), DimensionError);
}

TEST(TrackletNew, SharesFrame) {
  const Tracklet a = tracklet_new({det(1, {1}), det(5, {1})});
  const Tracklet b = tracklet_new({det(2, {1}), det(5, {1})});
  const Tracklet c = tracklet_new({det(2, {1}), det(3, {1})});
  EXPECT_TRUE(a.shares_frame_with(b));
  EXPECT_FALSE(a.shares_frame_with(c));
}

// Permutation invariance and median recomputation against a full-sort oracle.
TEST(TrackletNew, PropertyPermutationInvariantAndMedianMatchesOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> val(-2.0f, 2.0f);
  std::uniform_int_distribution<int> len(1, 9), dim(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = len(rng);
    const int d = dim(rng);
    std::vector<Detection> dets;
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < n; ++i) {
      std::vector<float> f(static_cast<std::size_t>(d));
      for (auto& v : f) v = val(rng);
      rows.emplace_back(f.begin(), f.end());
      dets.push_back(det(1 + 3 * i, f, static_cast<std::size_t>(i)));
    }
    const Tracklet base = tracklet_new(dets);
    EXPECT_EQ(base.median_feature(), oracle::sorted_median(rows));
    std::shuffle(dets.begin(), dets.end(), rng);
    const Tracklet shuffled = tracklet_new(dets);
    EXPECT_EQ(shuffled.median_feature(), base.median_feature());
    ASSERT_EQ(shuffled.size(), base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_EQ(shuffled.detections()[i].source_row, base.detections()[i].source_row);
    }
  }
}

TEST(FcgConfig, DefaultsArePublishedConstants) {
  const FcgConfig cfg;
  EXPECT_EQ(cfg.window, 6);
  EXPECT_DOUBLE_EQ(cfg.tracklet_threshold, 0.055);
  EXPECT_DOUBLE_EQ(cfg.track_threshold, 0.055);
  EXPECT_DOUBLE_EQ(cfg.kt, 40.0);
  EXPECT_DOUBLE_EQ(cfg.ct, 4.0);
  EXPECT_DOUBLE_EQ(cfg.off, 0.15);
  EXPECT_DOUBLE_EQ(cfg.kf, 2.0);
  EXPECT_DOUBLE_EQ(cfg.cf, 2.0);
  EXPECT_DOUBLE_EQ(cfg.score_threshold, 0.7);
  EXPECT_EQ(cfg.feature_dim, 2048u);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(FcgConfig, ValidateRejectsOutOfRange) {
  auto bad = [](auto mutate) {
    FcgConfig cfg;
    mutate(cfg);
    return cfg;
  };
  EXPECT_THROW(bad([](FcgConfig& c) { c.window = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](FcgConfig& c) { c.tracklet_threshold = 0.0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](FcgConfig& c) { c.ct = 0.5; }).validate(), ConfigError);
  EXPECT_THROW(bad([](FcgConfig& c) { c.cf = 0.9; }).validate(), ConfigError);
  EXPECT_THROW(bad([](FcgConfig& c) { c.off = 0.0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](FcgConfig& c) { c.off = 1.5; }).validate(), ConfigError);
  EXPECT_NO_THROW(bad([](FcgConfig& c) { c.off = 1.0; }).validate());
}

TEST(TrackSet, KeepsFrameOrderAndRejectsDuplicates) {
  TrackSet s;
  s.add(1, {3, {0, 0, 1, 1}, 1.0});
  s.add(1, {1, {0, 0, 1, 1}, 1.0});
  EXPECT_EQ(s.tracks().at(1).front().frame, 1);
  EXPECT_THROW(s.add(1, {3, {1, 1, 1, 1}, 1.0}), ConstraintViolation);
  EXPECT_EQ(s.box_count(), 2u);
}

}  // namespace
}  // namespace fcg
