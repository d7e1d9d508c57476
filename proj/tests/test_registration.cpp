#include <gtest/gtest.h>

#include <Eigen/Cholesky>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "radloc/errors.hpp"
#include "radloc/registration.hpp"

namespace radloc {
namespace {

using testing::identity_pairs;
using testing::moved;
using testing::random_cloud;
using testing::rot_err;
using testing::submap_from;
using testing::trans_err;

constexpr double kPi = std::numbers::pi;

TEST(Residual, Examples) {
  const Submap a = submap_from({{1, 2}}, Eigen::Matrix2d::Identity());
  const ResidualTerm r = residual(Pose(), {0, 0}, a, a);
  EXPECT_EQ(r.d.norm(), 0.0);
  const ResidualTerm r2 = residual(Pose(0.7, 3, 4), {0, 0}, a, a);
  EXPECT_LT((r2.S - 2 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-12);

  Submap x = submap_from({{1, 0}}, Eigen::Vector2d(4, 1).asDiagonal());
  Submap y = submap_from({{0, 1}}, Eigen::Matrix2d::Zero());
  const ResidualTerm r3 = residual(Pose(kPi / 2, 0, 0), {0, 0}, x, y);
  Eigen::Matrix2d expected;
  expected << 1, 0, 0, 4;
  EXPECT_LT((r3.S - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(r3.d.norm(), 1e-12);
}

TEST(Residual, SingularCovarianceThrows) {
  const Submap a = submap_from({{1, 2}}, Eigen::Matrix2d::Zero());
  EXPECT_THROW(residual(Pose(), {0, 0}, a, a), SingularCovariance);
  EXPECT_THROW(guarded_inverse(Eigen::Vector2d(1.0, 1e-14).asDiagonal()), SingularCovariance);
  EXPECT_NO_THROW(guarded_inverse(Eigen::Vector2d(1.0, 1e-6).asDiagonal()));
}

TEST(ResidualJacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a(-kPi, kPi), t(-20, 20);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d q(t(rng), t(rng), a(rng));
    const Eigen::Vector2d x(t(rng), t(rng)), y(t(rng), t(rng));
    auto f = [&](const Eigen::Vector3d& p) { return Eigen::Vector2d(y - Pose(p[2], p[0], p[1]) * x); };
    Eigen::Matrix<double, 2, 3> fd;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e[k] = h;
      fd.col(k) = (f(q + e) - f(q - e)) / (2 * h);
    }
    EXPECT_LT((residual_jacobian(Pose(q[2], q[0], q[1]), x) - fd).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(CauchyLoss, ValuesAndWeight) {
  const CauchyLoss loss(2.0);
  EXPECT_EQ(loss.cost(0.0), 0.0);
  EXPECT_NEAR(loss.cost(4.0), 4.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(loss.weight(4.0), 0.5, 1e-12);
  EXPECT_NEAR(loss.cost(1e-8), 1e-8, 1e-15);
  // bounded influence: s * w(s) stays below c^2
  for (double s : {1.0, 1e2, 1e4, 1e8}) EXPECT_LT(s * loss.weight(s), 4.0);
}

TEST(RegisterWeighted, IdenticalCloudsGiveIdentity) {
  std::mt19937_64 rng(1);
  const Submap s = submap_from(random_cloud(50, 30, rng));
  const RegistrationResult r = register_weighted(s, s, identity_pairs(50), Pose());
  EXPECT_LT(r.transform.translation().norm(), 1e-12);
  EXPECT_LT(std::abs(r.transform.theta()), 1e-12);
  EXPECT_LE(r.final_cost, 1e-18);
  EXPECT_TRUE(r.converged);
}

class KnownTransform : public ::testing::TestWithParam<int> {};

TEST_P(KnownTransform, WeightedAndUnweightedRecover) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  std::uniform_real_distribution<double> t(-2, 2), a(-10 * kPi / 180, 10 * kPi / 180);
  const Pose truth(a(rng), t(rng), t(rng));
  const auto cloud = random_cloud(80, 40, rng);
  const Submap cur = submap_from(cloud);
  const Submap prev = submap_from(moved(cloud, truth));
  for (const bool weighted : {true, false}) {
    const RegistrationResult r =
        weighted ? register_weighted(cur, prev, identity_pairs(80), Pose())
                 : register_unweighted(cur, prev, identity_pairs(80), Pose());
    EXPECT_LT(trans_err(r.transform, truth), 1e-6);
    EXPECT_LT(rot_err(r.transform, truth), 1e-8);
    EXPECT_GE(r.final_cost, 0.0);
    EXPECT_LE(r.iterations, SolverConfig{}.max_iterations);
    for (std::size_t k = 1; k < r.cost_history.size(); ++k) {
      EXPECT_LE(r.cost_history[k], r.cost_history[k - 1]);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, KnownTransform, ::testing::Range(0, 10));

TEST(RegisterWeighted, GaugeConsistency) {
  std::mt19937_64 rng(21);
  const Pose truth(0.12, 1.5, -0.8);
  const auto cloud = random_cloud(60, 30, rng);
  const Submap cur = submap_from(cloud);
  const Submap prev = submap_from(moved(cloud, truth));
  const Pose fwd = register_weighted(cur, prev, identity_pairs(60), Pose()).transform;
  const Pose bwd = register_weighted(prev, cur, identity_pairs(60), Pose()).transform;
  const Pose id = fwd * bwd;
  EXPECT_LT(id.translation().norm(), 1e-4);
  EXPECT_LT(std::abs(id.theta()), 1e-5);
}

TEST(RegisterWeighted, EqualsUnweightedForIsotropicCovariance) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 0.1);
  const Pose truth(0.05, 0.7, 0.3);
  const auto cloud = random_cloud(60, 30, rng);
  auto target = moved(cloud, truth);
  for (auto& p : target) p += Eigen::Vector2d(n(rng), n(rng));
  const Submap cur = submap_from(cloud, Eigen::Matrix2d::Identity() * 0.5);
  const Submap prev = submap_from(target, Eigen::Matrix2d::Identity() * 0.5);
  SolverConfig cfg;
  cfg.cauchy_scale = 1e6;  // keep the loss quadratic so only the scale of S differs
  const Pose w = register_weighted(cur, prev, identity_pairs(60), Pose(), cfg).transform;
  const Pose u = register_unweighted(cur, prev, identity_pairs(60), Pose(), cfg).transform;
  EXPECT_LT(trans_err(w, u), 1e-8);
  EXPECT_LT(rot_err(w, u), 1e-8);
}

TEST(RegisterWeighted, CauchyRejectsGrossOutlier) {
  std::mt19937_64 rng(7);
  const Pose truth(0.08, -1.0, 1.2);
  auto cloud = random_cloud(40, 30, rng);
  auto target = moved(cloud, truth);
  cloud.emplace_back(0.0, 0.0);
  target.emplace_back(100.0, 0.0);
  const Submap cur = submap_from(cloud);
  const Submap prev = submap_from(target);
  const RegistrationResult r = register_weighted(cur, prev, identity_pairs(41), truth * Pose(0.01, 0.2, 0.1));
  EXPECT_LT(trans_err(r.transform, truth), 1e-3);
}

TEST(RegisterWeighted, NeedsThreeCorrespondences) {
  const Submap s = submap_from({{0, 0}, {1, 0}});
  EXPECT_THROW(register_weighted(s, s, identity_pairs(2), Pose()), InsufficientInliers);
  EXPECT_THROW(register_unweighted(s, s, identity_pairs(2), Pose()), InsufficientInliers);
}

TEST(RegisterWeighted, FrozenCovarianceStillRecovers) {
  std::mt19937_64 rng(9);
  const Pose truth(0.15, 1.0, 1.0);
  const auto cloud = random_cloud(50, 30, rng);
  const Submap cur = submap_from(cloud, Eigen::Vector2d(0.5, 0.01).asDiagonal());
  const Submap prev = submap_from(moved(cloud, truth), Eigen::Vector2d(0.01, 0.5).asDiagonal());
  SolverConfig cfg;
  cfg.refresh_covariance = false;
  const RegistrationResult r = register_weighted(cur, prev, identity_pairs(50), Pose(), cfg);
  EXPECT_LT(trans_err(r.transform, truth), 1e-6);
}

// Near points are precise, far points carry wide angular noise; the weighted
// estimator should trust the near ones.
TEST(RegisterWeighted, HeteroscedasticBeatsUnweighted) {
  const RadarParams params(0.04);
  const PolarNoise near_noise{0.05, 0.0, 0.1 * kPi / 180};
  const PolarNoise far_noise{0.25, 0.0, 3.0 * kPi / 180};
  double err_w = 0.0;
  double err_u = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> near_r(5, 20), far_r(60, 100), phi(-1.2, 1.2);
    std::normal_distribution<double> n(0, 1);
    const Pose truth(0.03, 0.5, -0.3);
    Submap cur;
    Submap prev;
    for (int i = 0; i < 40; ++i) {
      const bool far = i >= 30;
      const PolarNoise& noise = far ? far_noise : near_noise;
      const RadarDetection det{far ? far_r(rng) : near_r(rng), phi(rng), 0.0, 0.0};
      const CovariantPoint cp = propagate_covariance(det, noise, params);
      const Eigen::Matrix2d L = cp.covariance.llt().matrixL();
      CovariantPoint x = cp;
      x.position.head<2>() += L * Eigen::Vector2d(n(rng), n(rng));
      CovariantPoint y = cp;
      const Eigen::Matrix2d R = truth.rotation();
      y.covariance = R * cp.covariance * R.transpose();
      y.position.head<2>() = truth * Eigen::Vector2d(cp.position.head<2>()) +
                             R * L * Eigen::Vector2d(n(rng), n(rng));
      cur.points.push_back(x);
      prev.points.push_back(y);
    }
    err_w += trans_err(register_weighted(cur, prev, identity_pairs(40), Pose()).transform, truth);
    err_u += trans_err(register_unweighted(cur, prev, identity_pairs(40), Pose()).transform, truth);
  }
  EXPECT_LE(err_w, err_u);
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  c.cauchy_scale = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.param_tolerance = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Icp, IdenticalClouds) {
  std::mt19937_64 rng(1);
  const Submap s = submap_from(random_cloud(200, 40, rng));
  const RegistrationResult r = icp_register(s, s, Pose());
  EXPECT_LT(r.transform.translation().norm(), 1e-9);
  EXPECT_LT(std::abs(r.transform.theta()), 1e-9);
}

TEST(Icp, SmallPerturbation) {
  std::mt19937_64 rng(2);
  const auto cloud = random_cloud(200, 40, rng);
  const Pose truth(2.0 * kPi / 180, 0.3 * std::cos(0.4), 0.3 * std::sin(0.4));
  const RegistrationResult r =
      icp_register(submap_from(cloud), submap_from(moved(cloud, truth)), Pose());
  EXPECT_LT(trans_err(r.transform, truth), 1e-6);
  EXPECT_LT(rot_err(r.transform, truth), 1e-6);
  EXPECT_TRUE(r.converged);
}

TEST(Icp, EmptyThrows) {
  const Submap s = submap_from({{0, 0}});
  EXPECT_THROW(icp_register(Submap{}, s, Pose()), EmptySubmap);
}

// Point-symmetric clusters centred in 5 m cells: every cell's points are
// exactly described by its Gaussian, so the NDT optimum is unbiased.
std::vector<Eigen::Vector2d> cell_clusters(int cells_per_side) {
  const std::vector<Eigen::Vector2d> pattern{{0.9, 0.4},  {-0.9, 0.4}, {0.9, -0.4}, {-0.9, -0.4},
                                             {0.3, 1.0},  {-0.3, 1.0}, {0.3, -1.0}, {-0.3, -1.0}};
  std::vector<Eigen::Vector2d> out;
  for (int i = 0; i < cells_per_side; ++i) {
    for (int j = 0; j < cells_per_side; ++j) {
      const Eigen::Vector2d centre(5.0 * i + 2.5, 5.0 * j + 2.5);
      for (const auto& d : pattern) out.push_back(centre + d);
    }
  }
  return out;
}

TEST(Ndt, IdenticalClouds) {
  const Submap s = submap_from(cell_clusters(8));
  const RegistrationResult r = ndt_register(s, s, Pose());
  EXPECT_LT(r.transform.translation().norm(), 1e-4);
  EXPECT_LT(std::abs(r.transform.theta()), 1e-4);
  EXPECT_GE(r.final_cost, 0.0);
  EXPECT_EQ(r.inlier_count, 64u);
}

TEST(Ndt, KnownSmallTransform) {
  const auto target = cell_clusters(8);
  const Pose truth(1.0 * kPi / 180, 0.3, -0.2);
  const RegistrationResult r =
      ndt_register(submap_from(moved(target, truth.inverse())), submap_from(target), Pose());
  EXPECT_LT(trans_err(r.transform, truth), 1e-3);
  EXPECT_LT(rot_err(r.transform, truth), 1e-4);
}

TEST(Ndt, UniformCloudWithinGridBias) {
  std::mt19937_64 rng(4);
  const auto cloud = random_cloud(800, 30, rng);
  const Pose truth(1.0 * kPi / 180, 0.3, -0.2);
  const RegistrationResult r =
      ndt_register(submap_from(cloud), submap_from(moved(cloud, truth)), Pose());
  EXPECT_LT(trans_err(r.transform, truth), 0.1);
  EXPECT_LT(rot_err(r.transform, truth), 5e-3);
}

TEST(Ndt, SparseCellsAreSkipped) {
  // two points per cell everywhere: nothing to build a covariance from
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < 5; ++i) {
    pts.emplace_back(10.0 * i + 1.0, 1.0);
    pts.emplace_back(10.0 * i + 2.0, 2.0);
  }
  EXPECT_THROW(ndt_register(submap_from(pts), submap_from(pts), Pose()), EmptyGrid);
}

TEST(AllRegistrars, AgreeOnNoiseFreeFixture) {
  const Pose truth(0.01, 0.2, 0.1);
  const auto cloud = moved(cell_clusters(8), truth.inverse());
  const Submap cur = submap_from(cloud);
  const Submap prev = submap_from(moved(cloud, truth));
  const auto pairs = identity_pairs(cloud.size());
  EXPECT_LT(trans_err(register_weighted(cur, prev, pairs, Pose()).transform, truth), 1e-6);
  EXPECT_LT(trans_err(register_unweighted(cur, prev, pairs, Pose()).transform, truth), 1e-6);
  EXPECT_LT(trans_err(icp_register(cur, prev, Pose()).transform, truth), 1e-6);
  EXPECT_LT(trans_err(ndt_register(cur, prev, Pose()).transform, truth), 1e-3);
}

TEST(ComposeGlobal, Properties) {
  const Pose a(0.3, 1, 2), b(-0.7, 4, -1), c(1.1, 0.5, 0.5);
  auto same = [](const Pose& x, const Pose& y) {
    return trans_err(x, y) < 1e-12 && rot_err(x, y) < 1e-12;
  };
  EXPECT_TRUE(same(compose_global(Pose(), a), a));
  EXPECT_TRUE(same(compose_global(a, Pose()), a));
  EXPECT_TRUE(same(compose_global(compose_global(a, b), c), compose_global(a, compose_global(b, c))));
}

}  // namespace
}  // namespace radloc
