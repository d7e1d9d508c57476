#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "radloc/pose.hpp"
#include "radloc/radar.hpp"

namespace radloc {

struct Scene {
  std::vector<Eigen::Vector2d> landmarks;  // static reflectors, world frame
  std::uint64_t seed = 0;
  double extent = 0.0;  // landmarks lie in [-extent, extent]^2
};

struct SensorSpec {
  double max_range = 100.0;                        // m
  double fov = 150.0 * std::numbers::pi / 180.0;  // rad, full width
  RadarParams params = RadarParams(0.04);
  double scan_rate = 13.0;  // Hz
  Pose extrinsic;           // sensor -> body

  void validate() const;
};

enum class NoiseFamily { gaussian, gamma, student_t };

NoiseFamily parse_noise_family(const std::string& name);
std::string noise_family_name(NoiseFamily family);

enum class NoiseChannel { range, angle, velocity };

struct NoiseSpec {
  NoiseFamily family = NoiseFamily::gaussian;
  double range_param = 0.25;                                  // m
  double angle_param = 0.5 * std::numbers::pi / 180.0;  // rad
  double velocity_param = 0.1;                                // m/s
  double dof = 100.0;          // student-t only
  double gamma_shape = 1.0;    // gamma only
  /// Fraction of emitted detections that are uniformly random clutter.
  double outlier_rate = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  double param(NoiseChannel channel) const;
};

struct TrajectorySample {
  double t = 0.0;  // s
  Pose pose;
  double speed = 0.0;  // m/s
};

struct Trajectory {
  std::string route;
  std::vector<TrajectorySample> samples;
};

struct TrajectoryOptions {
  std::string route = "route";
  /// Arc length skipped before the first sample (m).
  double start_offset = 0.0;
  /// Shift to the left of the direction of travel (m).
  double lateral_offset = 0.0;
};

Scene generate_scene(std::size_t landmark_count, double extent, std::uint64_t seed);

/// Constant-speed traversal of a piecewise-linear route sampled at scan_rate,
/// heading along the segment direction. Throws ConfigError for fewer than two
/// waypoints or a zero-length route.
Trajectory generate_trajectory(const std::vector<Eigen::Vector2d>& route, double mean_speed,
                               double scan_rate, const TrajectoryOptions& options = {});

/// One zero-mean draw for the given channel.
double sample_noise(const NoiseSpec& noise, NoiseChannel channel, std::mt19937_64& rng);

/// Detections of every landmark inside range and field of view, seen from
/// `pose` moving with world-frame `velocity`. With doppler_on the range is
/// distorted by beta * v before noise is added; without it the velocity
/// channel carries noise only.
Scan simulate_scan(const Scene& scene, const Pose& pose, const Eigen::Vector2d& velocity,
                   double timestamp, const SensorSpec& spec, const NoiseSpec& noise,
                   bool doppler_on, std::mt19937_64& rng);

/// For every sample of `a`, the nearest sample of `b` (position only) when it
/// lies within max_dist. Ties go to the lower index.
std::vector<std::pair<std::size_t, std::size_t>> find_loop_pairs(const Trajectory& a,
                                                                 const Trajectory& b,
                                                                 double max_dist);

/// One pass over the route.
struct RoundSpec {
  std::string name;
  double speed = 0.0;  // m/s
  double start_offset = 0.0;
  double lateral_offset = 0.0;
};

struct DatasetSpec {
  std::size_t landmark_count = 300;
  double extent = 200.0;
  std::uint64_t scene_seed = 1;
  SensorSpec sensor;
  NoiseSpec noise;
  bool doppler_on = true;
  std::vector<Eigen::Vector2d> route;
  std::vector<RoundSpec> rounds;
  /// Previous-side round; every other round is paired against it.
  std::string reference_round;
  std::size_t submap_scans = 10;
  double loop_max_dist = 2.0;  // m
  std::size_t pair_stride = 1;
  std::size_t max_pairs = 0;   // 0 = no cap

  void validate() const;
};

struct ScanRange {
  std::string route;
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

struct LoopPair {
  std::size_t id = 0;
  ScanRange current;   // "a"
  ScanRange previous;  // "b"
  Pose ground_truth;   // current anchor -> previous anchor
  double velocity_diff = 0.0;  // |mean speed a - mean speed b|, m/s
};

struct DatasetManifest {
  std::vector<std::string> routes;
  std::vector<LoopPair> pairs;
};

/// Simulated trajectories and their scans, before anything is written.
struct SimulatedRound {
  Trajectory trajectory;
  std::vector<Scan> scans;
};

std::vector<SimulatedRound> simulate_rounds(const DatasetSpec& spec);

/// Pairs every non-reference round against the reference round.
DatasetManifest build_manifest(const DatasetSpec& spec, const std::vector<SimulatedRound>& rounds);

/// Writes scans_<round>.jsonl, poses_<round>.json and manifest.json.
DatasetManifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir);

}  // namespace radloc
