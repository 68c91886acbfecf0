#include <gtest/gtest.h>

#include <random>

#include "fcg/metrics.hpp"
#include "oracles.hpp"

namespace fcg {
namespace {

BBox at(int frame) { return {10.0 * frame, 0, 20, 40}; }

TrackSet straight(int id, int first, int last) {
  TrackSet t;
  for (int f = first; f <= last; ++f) t.add(id, {f, at(f), 1.0});
  return t;
}

TrackSet merged(std::initializer_list<TrackSet> parts) {
  TrackSet out;
  for (const auto& p : parts) {
    for (const auto& [id, points] : p.tracks()) {
      for (const auto& pt : points) out.add(id, pt);
    }
  }
  return out;
}

TEST(Idf1, IdenticalIsOne) {
  const TrackSet gt = straight(1, 1, 10);
  EXPECT_EQ(idf1(gt, gt), 1.0);
  EXPECT_EQ(id_switches(gt, gt), 0u);
}

TEST(Idf1, SplitTrackHalvesScoreAndSwitchesOnce) {
  const TrackSet gt = straight(1, 1, 10);
  const TrackSet pred = merged({straight(1, 1, 5), straight(2, 6, 10)});
  EXPECT_NEAR(idf1(gt, pred), 0.5, 1e-12);
  EXPECT_EQ(id_switches(gt, pred), 1u);
}

TEST(Idf1, EmptyPredictionIsZero) { EXPECT_EQ(idf1(straight(1, 1, 10), TrackSet{}), 0.0); }

TEST(Idf1, BothEmptyIsOne) { EXPECT_EQ(idf1(TrackSet{}, TrackSet{}), 1.0); }

TEST(IdSwitches, AlternatingLabels) {
  const TrackSet gt = straight(1, 1, 4);
  TrackSet pred;
  for (int f = 1; f <= 4; ++f) pred.add(f % 2 == 1 ? 7 : 8, {f, at(f), 1.0});
  EXPECT_EQ(id_switches(gt, pred), 3u);
}

TEST(IdSwitches, GapsDoNotCountButLabelChangeAcrossGapDoes) {
  const TrackSet gt = straight(1, 1, 10);
  const TrackSet pred = merged({straight(1, 1, 3), straight(2, 8, 10)});
  EXPECT_EQ(id_switches(gt, pred), 1u);
  EXPECT_EQ(id_switches(gt, merged({straight(1, 1, 3), straight(1, 8, 10)})), 0u);
}

TEST(IdSwitches, LowOverlapIsUnmatched) {
  const TrackSet gt = straight(1, 1, 3);
  TrackSet pred;
  for (int f = 1; f <= 3; ++f) pred.add(f, {f, {at(f).x + 15, 0, 20, 40}, 1.0});  // IoU 1/7
  EXPECT_EQ(id_switches(gt, pred), 0u);
  EXPECT_EQ(idf1(gt, pred), 0.0);
}

TrackSet random_tracks(std::mt19937_64& rng, int max_ids, int frames) {
  std::uniform_int_distribution<int> ids(0, max_ids), slot(0, 5);
  std::bernoulli_distribution present(0.7);
  TrackSet t;
  const int n = ids(rng);
  for (int id = 1; id <= n; ++id) {
    const int lane = slot(rng);
    for (int f = 1; f <= frames; ++f) {
      if (present(rng)) t.add(id, {f, {100.0 * lane, 0, 20, 40}, 1.0});
    }
  }
  return t;
}

TEST(MetricsProperties, RelabelingPredictionsChangesNothing) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const TrackSet gt = random_tracks(rng, 4, 8);
    const TrackSet pred = random_tracks(rng, 4, 8);
    TrackSet relabeled;
    for (const auto& [id, points] : pred.tracks()) {
      for (const auto& p : points) relabeled.add(100 - id, p);
    }
    EXPECT_EQ(idf1(gt, pred), idf1(gt, relabeled));
  }
}

TEST(MetricsProperties, HungarianMatchesBruteForce) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const TrackSet gt = random_tracks(rng, 4, 6);
    const TrackSet pred = random_tracks(rng, 4, 6);
    const auto counts = pairwise_overlap_frames(gt, pred, 0.5);
    const double best = oracle::brute_force_max_assignment(counts);
    EXPECT_EQ(static_cast<double>(identity_counts(gt, pred).idtp), best) << "trial " << trial;
  }
}

TEST(MetricsProperties, HungarianOnRandomCostMatrices) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> n(1, 5), v(0, 9);
  for (int trial = 0; trial < 500; ++trial) {
    const auto rows = static_cast<std::size_t>(n(rng)), cols = static_cast<std::size_t>(n(rng));
    std::vector<std::vector<double>> w(rows, std::vector<double>(cols));
    for (auto& r : w) {
      for (auto& x : r) x = v(rng);
    }
    auto cost = w;
    for (auto& r : cost) {
      for (auto& x : r) x = -x;
    }
    const auto a = hungarian_min_cost(cost);
    ASSERT_EQ(a.size(), rows);
    double total = 0.0;
    std::vector<int> used;
    for (std::size_t r = 0; r < rows; ++r) {
      if (a[r] < 0) continue;
      EXPECT_EQ(std::count(used.begin(), used.end(), a[r]), 0);
      used.push_back(a[r]);
      total += w[r][static_cast<std::size_t>(a[r])];
    }
    EXPECT_EQ(total, oracle::brute_force_max_assignment(w));
  }
}

TEST(MetricsProperties, Bounds) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const TrackSet gt = random_tracks(rng, 4, 8);
    const TrackSet pred = random_tracks(rng, 4, 8);
    const double s = idf1(gt, pred);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    const auto c = identity_counts(gt, pred);
    EXPECT_EQ(c.idtp + c.idfn, gt.box_count());
    EXPECT_EQ(c.idtp + c.idfp, pred.box_count());
    EXPECT_LE(id_switches(gt, pred), gt.box_count());
  }
}

}  // namespace
}  // namespace fcg
