#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "radloc/association.hpp"
#include "radloc/errors.hpp"

namespace radloc {
namespace {

using testing::moved;
using testing::random_cloud;
using testing::submap_from;

constexpr double kPi = std::numbers::pi;

TEST(MatchDescriptors, IdenticalSubmapsPairIdentity) {
  std::mt19937_64 rng(1);
  const Submap s = describe(submap_from(random_cloud(150, 40, rng)));
  const auto matches = match_descriptors(s, s);
  ASSERT_FALSE(matches.empty());
  for (const Correspondence& c : matches) EXPECT_EQ(c.index_x, c.index_y);
}

TEST(MatchDescriptors, SurvivesRigidTransform) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(-kPi, kPi), t(-50, 50);
  const auto cloud = random_cloud(150, 40, rng);
  const Submap cur = describe(submap_from(cloud));
  const auto base = match_descriptors(cur, cur);
  for (int i = 0; i < 50; ++i) {
    const Submap prev = describe(submap_from(moved(cloud, Pose(a(rng), t(rng), t(rng)))));
    EXPECT_EQ(match_descriptors(cur, prev), base);
  }
}

TEST(MatchDescriptors, SinglePoints) {
  const Submap a = describe(submap_from({{0, 0}}));
  const Submap b = describe(submap_from({{5, 5}}));
  const auto m = match_descriptors(a, b);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0], (Correspondence{0, 0}));
}

TEST(MatchDescriptors, UndescribedThrows) {
  const Submap a = submap_from({{0, 0}});
  EXPECT_THROW(match_descriptors(a, a), NoMatches);
}

TEST(SolveTwoPoint, ExactOnBothPoints) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a(-kPi, kPi), t(-50, 50);
  for (int i = 0; i < 100; ++i) {
    const Pose T(a(rng), t(rng), t(rng));
    const Eigen::Vector2d x1(t(rng), t(rng)), x2(t(rng), t(rng));
    const Pose s = solve_two_point(x1, x2, T * x1, T * x2);
    EXPECT_LT((s * x1 - T * x1).norm(), 1e-12);
    EXPECT_LT((s * x2 - T * x2).norm(), 1e-12);
  }
  EXPECT_THROW(solve_two_point({1, 1}, {1, 1}, {0, 0}, {1, 0}), DegenerateSample);
}

TEST(FitRigid, RecoversTransform) {
  std::mt19937_64 rng(4);
  const auto src = random_cloud(30, 20, rng);
  const Pose T(0.3, -2.0, 4.0);
  const auto dst = moved(src, T);
  const Pose fit = fit_rigid(src, dst);
  EXPECT_LT(testing::trans_err(fit, T), 1e-12);
  EXPECT_LT(testing::rot_err(fit, T), 1e-12);
}

struct RansacFixture {
  Submap cur;
  Submap prev;
  std::vector<Correspondence> cands;
  Pose truth{0.1, 1.0, -0.5};
};

RansacFixture make_fixture(std::size_t outliers, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RansacFixture f;
  auto cloud = random_cloud(20, 30, rng);
  auto target = moved(cloud, f.truth);
  const auto junk_x = random_cloud(outliers, 30, rng);
  const auto junk_y = random_cloud(outliers, 30, rng);
  cloud.insert(cloud.end(), junk_x.begin(), junk_x.end());
  target.insert(target.end(), junk_y.begin(), junk_y.end());
  f.cur = submap_from(cloud);
  f.prev = submap_from(target);
  f.cands = testing::identity_pairs(cloud.size());
  return f;
}

TEST(Ransac, ExactCorrespondences) {
  const RansacFixture f = make_fixture(0, 5);
  const RansacResult r = ransac_rigid(f.cands, f.cur, f.prev);
  EXPECT_EQ(r.inliers.size(), 20u);
  EXPECT_LT(testing::trans_err(r.coarse_transform, f.truth), 1e-9);
  EXPECT_LT(testing::rot_err(r.coarse_transform, f.truth), 1e-9);
}

TEST(Ransac, FortyPercentOutliers) {
  const RansacFixture f = make_fixture(13, 6);  // 13 / 33 ~ 40%
  RansacConfig cfg;
  cfg.seed = 42;
  const RansacResult r = ransac_rigid(f.cands, f.cur, f.prev, cfg);
  std::vector<std::size_t> ids;
  for (const Correspondence& c : r.inliers) ids.push_back(c.index_x);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_NE(std::find(ids.begin(), ids.end(), i), ids.end());
  }
  EXPECT_LT(testing::trans_err(r.coarse_transform, f.truth), 1e-6);
  EXPECT_LT(testing::rot_err(r.coarse_transform, f.truth), 1e-6);
  for (const Correspondence& c : r.inliers) {
    const double res = (f.prev.points[c.index_y].position.head<2>() -
                        r.coarse_transform * Eigen::Vector2d(f.cur.points[c.index_x].position.head<2>()))
                           .norm();
    EXPECT_LT(res, cfg.inlier_threshold);
    EXPECT_NE(std::find(f.cands.begin(), f.cands.end(), c), f.cands.end());
  }
}

TEST(Ransac, Deterministic) {
  const RansacFixture f = make_fixture(13, 7);
  RansacConfig cfg;
  cfg.seed = 99;
  const RansacResult a = ransac_rigid(f.cands, f.cur, f.prev, cfg);
  const RansacResult b = ransac_rigid(f.cands, f.cur, f.prev, cfg);
  EXPECT_EQ(a.inliers, b.inliers);
  EXPECT_EQ(a.coarse_transform.theta(), b.coarse_transform.theta());
  EXPECT_EQ(a.coarse_transform.x(), b.coarse_transform.x());
}

TEST(Ransac, TooFewCandidates) {
  const RansacFixture f = make_fixture(0, 8);
  const std::vector<Correspondence> one{{0, 0}};
  EXPECT_THROW(ransac_rigid(one, f.cur, f.prev), InsufficientInliers);
  const std::vector<Correspondence> few{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_THROW(ransac_rigid(few, f.cur, f.prev), InsufficientInliers);
}

TEST(RansacConfig, Validation) {
  RansacConfig c;
  c.iterations = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.inlier_threshold = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace radloc
