#include "radloc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "radloc/errors.hpp"
#include "radloc/random.hpp"

namespace radloc {

void SensorSpec::validate() const {
  if (!(max_range > 0.0)) throw ConfigError("sensor max_range must be positive");
  if (!(fov > 0.0 && fov <= 2.0 * std::numbers::pi)) {
    throw ConfigError("sensor fov must lie in (0, 2pi]");
  }
  if (!(scan_rate > 0.0)) throw ConfigError("sensor scan_rate must be positive");
}

NoiseFamily parse_noise_family(const std::string& name) {
  if (name == "gaussian") return NoiseFamily::gaussian;
  if (name == "gamma") return NoiseFamily::gamma;
  if (name == "student_t") return NoiseFamily::student_t;
  throw ConfigError("unknown noise family '" + name + "' (expected gaussian, gamma, student_t)");
}

std::string noise_family_name(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::gaussian: return "gaussian";
    case NoiseFamily::gamma: return "gamma";
    case NoiseFamily::student_t: return "student_t";
  }
  return "unknown";
}

void NoiseSpec::validate() const {
  if (!(range_param >= 0.0 && angle_param >= 0.0 && velocity_param >= 0.0)) {
    throw ConfigError("noise parameters must be nonnegative");
  }
  if (family == NoiseFamily::student_t && !(dof > 2.0)) {
    throw ConfigError("student_t noise needs dof > 2");
  }
  if (family == NoiseFamily::gamma && !(gamma_shape > 0.0)) {
    throw ConfigError("gamma noise needs a positive shape");
  }
  if (!(outlier_rate >= 0.0 && outlier_rate < 1.0)) {
    throw ConfigError("outlier_rate must lie in [0, 1)");
  }
}

double NoiseSpec::param(NoiseChannel channel) const {
  switch (channel) {
    case NoiseChannel::range: return range_param;
    case NoiseChannel::angle: return angle_param;
    case NoiseChannel::velocity: return velocity_param;
  }
  return 0.0;
}

Scene generate_scene(std::size_t landmark_count, double extent, std::uint64_t seed) {
  if (landmark_count < 1) throw ConfigError("scene needs at least one landmark");
  if (!(extent > 0.0)) throw ConfigError("scene extent must be positive");
  Scene scene;
  scene.seed = seed;
  scene.extent = extent;
  scene.landmarks.reserve(landmark_count);
  std::mt19937_64 rng(derive_seed(seed, {0x5CE7E}));
  std::uniform_real_distribution<double> coord(-extent, extent);
  for (std::size_t i = 0; i < landmark_count; ++i) {
    const double x = coord(rng);
    const double y = coord(rng);
    scene.landmarks.emplace_back(x, y);
  }
  return scene;
}

Trajectory generate_trajectory(const std::vector<Eigen::Vector2d>& route, double mean_speed,
                               double scan_rate, const TrajectoryOptions& options) {
  if (route.size() < 2) throw ConfigError("a route needs at least two waypoints");
  if (!(mean_speed > 0.0)) throw ConfigError("trajectory speed must be positive");
  if (!(scan_rate > 0.0)) throw ConfigError("scan rate must be positive");

  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < route.size(); ++i) {
    cumulative.push_back(cumulative.back() + (route[i] - route[i - 1]).norm());
  }
  const double length = cumulative.back();
  if (!(length > 0.0)) throw ConfigError("route has zero length");
  if (options.start_offset < 0.0 || options.start_offset > length) {
    throw ConfigError("trajectory start_offset must lie on the route");
  }

  const auto count = static_cast<std::size_t>(
      std::floor((length - options.start_offset) * scan_rate / mean_speed + 1e-9) + 1);

  Trajectory traj;
  traj.route = options.route;
  traj.samples.reserve(count);
  std::size_t segment = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double s = std::min(options.start_offset + static_cast<double>(k) * mean_speed / scan_rate,
                              length);
    while (segment + 2 < route.size() && s > cumulative[segment + 1]) ++segment;
    // Skip zero-length segments for the heading.
    std::size_t seg = segment;
    while (seg + 2 < route.size() && cumulative[seg + 1] - cumulative[seg] <= 0.0) ++seg;
    const Eigen::Vector2d dir = route[seg + 1] - route[seg];
    const double seg_len = cumulative[seg + 1] - cumulative[seg];
    const double alpha = seg_len > 0.0 ? std::clamp((s - cumulative[seg]) / seg_len, 0.0, 1.0) : 0.0;
    const double heading = std::atan2(dir.y(), dir.x());
    const Eigen::Vector2d left(-std::sin(heading), std::cos(heading));
    const Eigen::Vector2d pos = route[seg] + alpha * dir + options.lateral_offset * left;
    traj.samples.push_back({static_cast<double>(k) / scan_rate, Pose(heading, pos), mean_speed});
  }
  return traj;
}

double sample_noise(const NoiseSpec& noise, NoiseChannel channel, std::mt19937_64& rng) {
  const double param = noise.param(channel);
  if (param == 0.0) return 0.0;
  switch (noise.family) {
    case NoiseFamily::gaussian: {
      std::normal_distribution<double> dist(0.0, param);
      return dist(rng);
    }
    case NoiseFamily::student_t: {
      std::student_t_distribution<double> dist(noise.dof);
      return param * dist(rng);
    }
    case NoiseFamily::gamma: {
      // Zero-centred: Gamma(shape, scale = param) minus its mean.
      std::gamma_distribution<double> dist(noise.gamma_shape, param);
      return dist(rng) - noise.gamma_shape * param;
    }
  }
  return 0.0;
}

Scan simulate_scan(const Scene& scene, const Pose& pose, const Eigen::Vector2d& velocity,
                   double timestamp, const SensorSpec& spec, const NoiseSpec& noise,
                   bool doppler_on, std::mt19937_64& rng) {
  Scan scan;
  scan.timestamp = timestamp;
  scan.sensor_extrinsic = spec.extrinsic;
  scan.ego_velocity = pose.rotation().transpose() * velocity;

  const Pose sensor_world = pose * spec.extrinsic;
  const Pose world_to_sensor = sensor_world.inverse();
  const double half_fov = 0.5 * spec.fov;

  auto add_noisy = [&](RadarDetection det) {
    det.range += sample_noise(noise, NoiseChannel::range, rng);
    det.azimuth = wrap_angle(det.azimuth + sample_noise(noise, NoiseChannel::angle, rng));
    det.radial_velocity += sample_noise(noise, NoiseChannel::velocity, rng);
    if (det.range >= 0.0) scan.detections.push_back(det);
  };

  std::size_t visible = 0;
  for (const Eigen::Vector2d& landmark : scene.landmarks) {
    const Eigen::Vector2d local = world_to_sensor * landmark;
    const double range = local.norm();
    if (range > spec.max_range || range <= 0.0) continue;
    const double azimuth = std::atan2(local.y(), local.x());
    if (std::abs(azimuth) > half_fov) continue;
    ++visible;

    const Eigen::Vector2d los = (landmark - sensor_world.translation()) / range;
    RadarDetection det;
    det.range = range;
    det.azimuth = azimuth;
    // Without Doppler coupling the sensor has no velocity channel; only its
    // noise is reported.
    det.radial_velocity = doppler_on ? -velocity.dot(los) : 0.0;
    det.timestamp = timestamp;
    if (doppler_on) {
      try {
        det = distort(det, spec.params);
      } catch (const NegativeRange&) {
        continue;
      }
    }
    add_noisy(det);
  }

  if (noise.outlier_rate > 0.0) {
    const auto clutter = static_cast<std::size_t>(
        std::llround(noise.outlier_rate / (1.0 - noise.outlier_rate) * static_cast<double>(visible)));
    const double vmax = std::max(velocity.norm(), 1.0);
    std::uniform_real_distribution<double> r_dist(0.0, spec.max_range);
    std::uniform_real_distribution<double> phi_dist(-half_fov, half_fov);
    std::uniform_real_distribution<double> v_dist(-vmax, vmax);
    for (std::size_t i = 0; i < clutter; ++i) {
      RadarDetection det;
      det.range = r_dist(rng);
      det.azimuth = phi_dist(rng);
      det.radial_velocity = doppler_on ? v_dist(rng) : 0.0;
      det.timestamp = timestamp;
      scan.detections.push_back(det);
    }
  }
  return scan;
}

std::vector<std::pair<std::size_t, std::size_t>> find_loop_pairs(const Trajectory& a,
                                                                 const Trajectory& b,
                                                                 double max_dist) {
  if (a.samples.empty() || b.samples.empty()) {
    throw ConfigError("loop-pair search needs two nonempty trajectories");
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const double max_sq = max_dist * max_dist;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const Eigen::Vector2d& p = a.samples[i].pose.translation();
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < b.samples.size(); ++j) {
      const double d = (b.samples[j].pose.translation() - p).squaredNorm();
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    if (best <= max_sq) out.emplace_back(i, best_j);
  }
  return out;
}

void DatasetSpec::validate() const {
  sensor.validate();
  noise.validate();
  if (landmark_count < 1) throw ConfigError("scene needs at least one landmark");
  if (!(extent > 0.0)) throw ConfigError("scene extent must be positive");
  if (route.size() < 2) throw ConfigError("route needs at least two waypoints");
  if (rounds.size() < 2) throw ConfigError("dataset needs at least two rounds");
  bool has_reference = false;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    if (rounds[i].name.empty()) throw ConfigError("round names must be nonempty");
    for (std::size_t j = 0; j < i; ++j) {
      if (rounds[j].name == rounds[i].name) {
        throw ConfigError("duplicate round name '" + rounds[i].name + "'");
      }
    }
    if (!(rounds[i].speed > 0.0)) throw ConfigError("round speed must be positive");
    has_reference = has_reference || rounds[i].name == reference_round;
  }
  if (!has_reference) throw ConfigError("reference_round '" + reference_round + "' not defined");
  if (submap_scans < 1) throw ConfigError("submap_scans must be at least 1");
  if (!(loop_max_dist > 0.0)) throw ConfigError("loop max_dist must be positive");
  if (pair_stride < 1) throw ConfigError("pair stride must be at least 1");
}

std::vector<SimulatedRound> simulate_rounds(const DatasetSpec& spec) {
  spec.validate();
  const Scene scene = generate_scene(spec.landmark_count, spec.extent, spec.scene_seed);
  std::vector<SimulatedRound> out;
  out.reserve(spec.rounds.size());
  for (std::size_t r = 0; r < spec.rounds.size(); ++r) {
    const RoundSpec& round = spec.rounds[r];
    SimulatedRound sim;
    sim.trajectory = generate_trajectory(spec.route, round.speed, spec.sensor.scan_rate,
                                         {round.name, round.start_offset, round.lateral_offset});
    sim.scans.reserve(sim.trajectory.samples.size());
    for (std::size_t k = 0; k < sim.trajectory.samples.size(); ++k) {
      const TrajectorySample& s = sim.trajectory.samples[k];
      std::mt19937_64 rng(derive_seed(spec.noise.seed, {r, k}));
      const Eigen::Vector2d velocity =
          s.speed * Eigen::Vector2d(std::cos(s.pose.theta()), std::sin(s.pose.theta()));
      sim.scans.push_back(simulate_scan(scene, s.pose, velocity, s.t, spec.sensor, spec.noise,
                                        spec.doppler_on, rng));
    }
    out.push_back(std::move(sim));
  }
  return out;
}

namespace {

double mean_speed(const Trajectory& traj, std::size_t begin, std::size_t end) {
  double sum = 0.0;
  for (std::size_t k = begin; k < end; ++k) sum += traj.samples[k].speed;
  return sum / static_cast<double>(end - begin);
}

}  // namespace

DatasetManifest build_manifest(const DatasetSpec& spec, const std::vector<SimulatedRound>& rounds) {
  DatasetManifest manifest;
  std::size_t ref = 0;
  for (std::size_t r = 0; r < spec.rounds.size(); ++r) {
    manifest.routes.push_back(spec.rounds[r].name);
    if (spec.rounds[r].name == spec.reference_round) ref = r;
  }
  const Trajectory& previous = rounds[ref].trajectory;
  const std::size_t k = spec.submap_scans;

  std::vector<LoopPair> all;
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    if (r == ref) continue;
    const Trajectory& current = rounds[r].trajectory;
    for (const auto& [i, j] : find_loop_pairs(current, previous, spec.loop_max_dist)) {
      if (i % spec.pair_stride != 0) continue;
      if (i + k > current.samples.size() || j + k > previous.samples.size()) continue;
      LoopPair pair;
      pair.current = {current.route, i, i + k};
      pair.previous = {previous.route, j, j + k};
      pair.ground_truth = previous.samples[j].pose.inverse() * current.samples[i].pose;
      pair.velocity_diff =
          std::abs(mean_speed(current, i, i + k) - mean_speed(previous, j, j + k));
      all.push_back(pair);
    }
  }

  if (spec.max_pairs > 0 && all.size() > spec.max_pairs) {
    std::vector<LoopPair> kept;
    kept.reserve(spec.max_pairs);
    for (std::size_t q = 0; q < spec.max_pairs; ++q) {
      kept.push_back(all[q * all.size() / spec.max_pairs]);
    }
    all = std::move(kept);
  }
  for (std::size_t id = 0; id < all.size(); ++id) all[id].id = id;
  manifest.pairs = std::move(all);
  return manifest;
}

}  // namespace radloc
