#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fcg/appearance.hpp"

namespace fcg {
namespace {

double cd(std::vector<double> a, std::vector<double> b) { return cosine_distance(a, b); }

Tracklet single(std::vector<float> f, int frame = 1) {
  Detection d;
  d.frame = frame;
  d.feature = std::move(f);
  return tracklet_new({d});
}

TEST(CosineDistance, Examples) {
  EXPECT_EQ(cd({0.3, 0.4}, {0.3, 0.4}), 0.0);
  EXPECT_EQ(cd({1, 0}, {0, 1}), 1.0);
  EXPECT_NEAR(cd({1, 0}, {1, 1}), 1.0 - 1.0 / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(cd({1, 0}, {1, 1}), 0.292893218813452, 1e-9);
}

TEST(CosineDistance, OppositeVectorsGiveTwo) { EXPECT_EQ(cd({1, -2}, {-1, 2}), 2.0); }

TEST(CosineDistance, Errors) {
  EXPECT_THROW(cd({0, 0}, {1, 0}), DegenerateFeatureError);
  EXPECT_THROW(cd({1, 0}, {0, 0}), DegenerateFeatureError);
  EXPECT_THROW(cd({1, 0}, {1, 0, 0}), DimensionError);
}

TEST(TrackletDistance, Examples) {
  EXPECT_EQ(tracklet_distance(single({0.2f, 0.7f}), single({0.2f, 0.7f}, 2)), 0.0);
  EXPECT_EQ(tracklet_distance(single({1, 0}), single({0, 1})), 1.0);
  EXPECT_NEAR(tracklet_distance(single({1, 0}), single({1, 1})), 0.292893218813452, 1e-9);
}

TEST(CosineProperties, SelfZeroSymmetricScaleInvariantBounded) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> comp(-3.0, 3.0), scale(1e-3, 1e3);
  std::uniform_int_distribution<int> dim(1, 64);
  for (int i = 0; i < 3000; ++i) {
    const auto d = static_cast<std::size_t>(dim(rng));
    std::vector<double> a(d), b(d);
    for (auto& v : a) v = comp(rng);
    for (auto& v : b) v = comp(rng);
    const double ab = cosine_distance(a, b);
    EXPECT_EQ(cosine_distance(a, a), 0.0);
    EXPECT_EQ(ab, cosine_distance(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 2.0);
    const double alpha = scale(rng), beta = scale(rng);
    auto sa = a, sb = b;
    for (auto& v : sa) v *= alpha;
    for (auto& v : sb) v *= beta;
    EXPECT_NEAR(cosine_distance(sa, sb), ab, 1e-9);
  }
}

}  // namespace
}  // namespace fcg
