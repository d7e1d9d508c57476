#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "radloc/errors.hpp"
#include "radloc/pipeline.hpp"
#include "radloc/simulator.hpp"

namespace radloc {
namespace {

NoiseSpec silent() {
  NoiseSpec n;
  n.range_param = n.angle_param = n.velocity_param = 0.0;
  return n;
}

// Ten scans along +x at `speed`, anchored at `start`.
std::vector<PosedScan> drive(const Scene& scene, const Pose& start, double speed,
                             const NoiseSpec& noise, std::uint64_t seed) {
  SensorSpec spec;
  std::vector<PosedScan> out;
  std::mt19937_64 rng(seed);
  const double dt = 1.0 / spec.scan_rate;
  for (int k = 0; k < 10; ++k) {
    const Pose rel(0.0, speed * dt * k, 0.0);
    const Pose world = start * rel;
    const Eigen::Vector2d v = world.rotation() * Eigen::Vector2d(speed, 0);
    Scan s = simulate_scan(scene, world, v, dt * k, spec, noise, true, rng);
    out.push_back({s, rel});
  }
  return out;
}

TEST(Methods, NamesRoundTrip) {
  for (Method m : all_methods()) EXPECT_EQ(parse_method(method_name(m)), m);
  EXPECT_THROW(parse_method("utr"), ConfigError);
  for (bool ue : {false, true}) {
    for (bool dc : {false, true}) {
      const MethodFlags f = method_flags(pipeline_arm(ue, dc));
      EXPECT_EQ(f.uncertainty, ue);
      EXPECT_EQ(f.compensation, dc);
    }
  }
}

TEST(Localize, IdenticalPairGivesIdentity) {
  const Scene scene = generate_scene(300, 150, 1);
  const auto scans = drive(scene, Pose(0.2, -20, 5), 15.0, NoiseSpec{}, 4);
  for (Method m : all_methods()) {
    const RegistrationResult r = localize(scans, scans, m, PipelineConfig{});
    // grid NDT carries a small bias on non-Gaussian cells
    const double tol = m == Method::ndt ? 0.1 : 1e-3;
    EXPECT_LT(r.transform.translation().norm(), tol) << method_name(m);
    EXPECT_LT(std::abs(r.transform.theta()), tol) << method_name(m);
  }
}

TEST(Localize, RecoversKnownOffset) {
  const Scene scene = generate_scene(300, 150, 2);
  const Pose a(0.1, -30, 0);
  const Pose b(0.05, -31, 1);
  const auto cur = drive(scene, a, 20.0, silent(), 1);
  const auto prev = drive(scene, b, 11.1, silent(), 2);
  const Pose gt = b.inverse() * a;
  const RegistrationResult r = localize(cur, prev, Method::dcloc, PipelineConfig{});
  EXPECT_LT(testing::trans_err(r.transform, gt), 1e-4);
  EXPECT_LT(testing::rot_err(r.transform, gt), 1e-5);
  const RegistrationResult raw = localize(cur, prev, Method::dcloc_no_dc, PipelineConfig{});
  EXPECT_GT(testing::trans_err(raw.transform, gt), 0.1);
}

TEST(InferEgoVelocities, ZeroNoiseConstantSpeed) {
  const Scene scene = generate_scene(400, 150, 3);
  const auto scans = drive(scene, Pose(0.0, -40, 0), 12.0, silent(), 1);
  PipelineConfig cfg;
  std::vector<Eigen::Vector2d> truth(scans.size(), Eigen::Vector2d(12.0, 0.0));
  const auto v = infer_ego_velocities(scans, cfg, truth);
  for (const Eigen::Vector2d& vk : v) EXPECT_LT((vk - Eigen::Vector2d(12.0, 0.0)).norm(), 1e-3);
}

TEST(PredictedRadialVelocity, MatchesSimulator) {
  const Scene scene = generate_scene(300, 150, 5);
  const auto scans = drive(scene, Pose(), 9.0, silent(), 1);
  const Scan pred = with_predicted_radial_velocity(scans[3].scan, {9.0, 0.0});
  for (std::size_t i = 0; i < pred.detections.size(); ++i) {
    EXPECT_NEAR(pred.detections[i].radial_velocity, scans[3].scan.detections[i].radial_velocity,
                1e-3);
  }
}

TEST(Egomotion, ZeroVelocityMatchesPlainRegistration) {
  const Scene scene = generate_scene(300, 150, 6);
  SensorSpec spec;
  std::mt19937_64 rng(1);
  auto standing = [&](const Pose& p) {
    std::vector<PosedScan> out;
    for (int k = 0; k < 10; ++k) {
      out.push_back({simulate_scan(scene, p, Eigen::Vector2d::Zero(), k / 13.0, spec, NoiseSpec{},
                                   true, rng),
                     Pose()});
    }
    return out;
  };
  const auto cur = standing(Pose(0.05, 1.0, 0.5));
  const auto prev = standing(Pose());
  PipelineConfig cfg;
  const Submap c = prepare_submap(cur, false, cfg);
  const Submap p = prepare_submap(prev, false, cfg);
  const Association assoc = associate(c, p, cfg);
  const Pose plain = register_weighted(c, p, assoc.inliers, assoc.coarse_transform).transform;
  const Pose ego = egomotion_compensated_register(c, p, Pose(), cfg).transform;
  EXPECT_LT(testing::trans_err(plain, ego), 0.02);
}

TEST(Egomotion, StaticSceneCloseToDcloc) {
  const Scene scene = generate_scene(300, 150, 7);
  const Pose a(0.0, -30, 0);
  const Pose b(0.02, -30.5, 0.8);
  const auto cur = drive(scene, a, 20.0, silent(), 1);
  const auto prev = drive(scene, b, 11.1, silent(), 2);
  const Pose gt = b.inverse() * a;
  const Pose ego = localize(cur, prev, Method::egomotion, PipelineConfig{}).transform;
  const Pose dc = localize(cur, prev, Method::dcloc, PipelineConfig{}).transform;
  EXPECT_LT(testing::trans_err(ego, gt), 0.05);
  EXPECT_LE(testing::trans_err(dc, gt), testing::trans_err(ego, gt) + 1e-9);
}

TEST(Egomotion, NeedsSources) {
  std::mt19937_64 rng(1);
  const Submap s = describe(testing::submap_from(testing::random_cloud(30, 20, rng)));
  EXPECT_THROW(egomotion_compensated_register(s, s, Pose(), PipelineConfig{}), EmptySubmap);
}

}  // namespace
}  // namespace radloc
