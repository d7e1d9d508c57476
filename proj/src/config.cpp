#include "radloc/config.hpp"

#include <initializer_list>
#include <numbers>
#include <string>

#include "radloc/errors.hpp"
#include "radloc/random.hpp"

namespace radloc {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key + "' in '" + where + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + where + "." + key + "'");
  }
}

double read_angle_deg(const json& j, const char* key, double fallback_rad, const std::string& where) {
  double deg = fallback_rad / kDegToRad;
  read(j, key, deg, where);
  return deg * kDegToRad;
}

Eigen::Vector2d read_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError("'" + where + "' entries must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

SensorSpec parse_sensor(const json& j) {
  check_keys(j, "sensor", {"max_range", "fov_deg", "beta", "chirp", "scan_rate", "extrinsic"});
  SensorSpec s;
  read(j, "max_range", s.max_range, "sensor");
  s.fov = read_angle_deg(j, "fov_deg", s.fov, "sensor");
  read(j, "scan_rate", s.scan_rate, "sensor");
  if (j.contains("beta") && j.contains("chirp")) {
    throw ConfigError("'sensor' takes either 'beta' or 'chirp', not both");
  }
  if (j.contains("beta")) {
    double beta = 0.0;
    read(j, "beta", beta, "sensor");
    s.params = RadarParams(beta);
  }
  if (j.contains("chirp")) {
    const json& c = j.at("chirp");
    check_keys(c, "sensor.chirp", {"center_frequency_hz", "bandwidth_hz", "chirp_duration_s"});
    double fc = 0.0;
    double bw = 0.0;
    double tr = 0.0;
    read(c, "center_frequency_hz", fc, "sensor.chirp");
    read(c, "bandwidth_hz", bw, "sensor.chirp");
    read(c, "chirp_duration_s", tr, "sensor.chirp");
    s.params = RadarParams::from_chirp(fc, bw, tr);
  }
  if (j.contains("extrinsic")) {
    const json& e = j.at("extrinsic");
    check_keys(e, "sensor.extrinsic", {"theta", "x", "y"});
    s.extrinsic = pose_from_json(e);
  }
  s.validate();
  return s;
}

NoiseSpec parse_noise(const json& j, NoiseSpec n) {
  check_keys(j, "noise", {"family", "range", "angle_deg", "velocity", "dof", "gamma_shape",
                          "outlier_rate", "seed"});
  std::string family = noise_family_name(n.family);
  read(j, "family", family, "noise");
  n.family = parse_noise_family(family);
  read(j, "range", n.range_param, "noise");
  n.angle_param = read_angle_deg(j, "angle_deg", n.angle_param, "noise");
  read(j, "velocity", n.velocity_param, "noise");
  read(j, "dof", n.dof, "noise");
  read(j, "gamma_shape", n.gamma_shape, "noise");
  read(j, "outlier_rate", n.outlier_rate, "noise");
  read(j, "seed", n.seed, "noise");
  n.validate();
  return n;
}

PolarNoise parse_model_noise(const json& j) {
  check_keys(j, "bench.model_noise", {"range", "velocity", "angle_deg"});
  PolarNoise n;
  read(j, "range", n.sigma_range, "bench.model_noise");
  read(j, "velocity", n.sigma_velocity, "bench.model_noise");
  n.sigma_azimuth = read_angle_deg(j, "angle_deg", n.sigma_azimuth, "bench.model_noise");
  n.validate();
  return n;
}

void parse_bench(const json& j, BenchConfig& b) {
  check_keys(j, "bench", {"methods", "inlier_threshold", "bin_width", "seed", "jobs",
                          "record_runtime", "model_noise", "descriptor", "match", "ransac",
                          "solver", "icp", "ndt", "egomotion"});
  if (j.contains("methods")) {
    std::vector<std::string> names;
    read(j, "methods", names, "bench");
    b.methods.clear();
    for (const auto& n : names) b.methods.push_back(parse_method(n));
  }
  read(j, "inlier_threshold", b.inlier_threshold, "bench");
  read(j, "bin_width", b.bin_width, "bench");
  read(j, "seed", b.seed, "bench");
  read(j, "jobs", b.jobs, "bench");
  read(j, "record_runtime", b.record_runtime, "bench");

  PipelineConfig& p = b.pipeline;
  if (j.contains("model_noise")) p.model_noise = parse_model_noise(j.at("model_noise"));
  if (j.contains("descriptor")) {
    const json& d = j.at("descriptor");
    check_keys(d, "bench.descriptor", {"ring_count", "ring_width"});
    read(d, "ring_count", p.descriptor.ring_count, "bench.descriptor");
    read(d, "ring_width", p.descriptor.ring_width, "bench.descriptor");
  }
  if (j.contains("match")) {
    const json& m = j.at("match");
    check_keys(m, "bench.match", {"k"});
    read(m, "k", p.match.k, "bench.match");
  }
  if (j.contains("ransac")) {
    const json& r = j.at("ransac");
    check_keys(r, "bench.ransac", {"iterations", "inlier_threshold", "min_inliers"});
    read(r, "iterations", p.ransac.iterations, "bench.ransac");
    read(r, "inlier_threshold", p.ransac.inlier_threshold, "bench.ransac");
    read(r, "min_inliers", p.ransac.min_inliers, "bench.ransac");
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, "bench.solver", {"max_iterations", "param_tolerance", "cost_tolerance",
                                   "initial_damping", "cauchy_scale", "refresh_covariance"});
    read(s, "max_iterations", p.solver.max_iterations, "bench.solver");
    read(s, "param_tolerance", p.solver.param_tolerance, "bench.solver");
    read(s, "cost_tolerance", p.solver.cost_tolerance, "bench.solver");
    read(s, "initial_damping", p.solver.initial_damping, "bench.solver");
    read(s, "cauchy_scale", p.solver.cauchy_scale, "bench.solver");
    read(s, "refresh_covariance", p.solver.refresh_covariance, "bench.solver");
  }
  if (j.contains("icp")) {
    const json& s = j.at("icp");
    check_keys(s, "bench.icp", {"max_iterations", "tolerance", "trim_factor"});
    read(s, "max_iterations", p.icp.max_iterations, "bench.icp");
    read(s, "tolerance", p.icp.tolerance, "bench.icp");
    read(s, "trim_factor", p.icp.trim_factor, "bench.icp");
  }
  if (j.contains("ndt")) {
    const json& s = j.at("ndt");
    check_keys(s, "bench.ndt", {"cell_size", "min_points", "eigen_ratio", "min_variance",
                                "max_iterations", "param_tolerance"});
    read(s, "cell_size", p.ndt.cell_size, "bench.ndt");
    read(s, "min_points", p.ndt.min_points, "bench.ndt");
    read(s, "eigen_ratio", p.ndt.eigen_ratio, "bench.ndt");
    read(s, "min_variance", p.ndt.min_variance, "bench.ndt");
    read(s, "max_iterations", p.ndt.max_iterations, "bench.ndt");
    read(s, "param_tolerance", p.ndt.param_tolerance, "bench.ndt");
  }
  if (j.contains("egomotion")) {
    const json& s = j.at("egomotion");
    check_keys(s, "bench.egomotion", {"passes"});
    read(s, "passes", p.egomotion.passes, "bench.egomotion");
  }
}

}  // namespace

void override_seed(RunConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.dataset.scene_seed = derive_seed(seed, {1});
  config.dataset.noise.seed = derive_seed(seed, {2});
  config.bench.seed = derive_seed(seed, {3});
}

RunConfig run_config_from_json(const json& j) {
  check_keys(j, "config", {"seed", "scene", "sensor", "noise", "doppler", "route", "rounds",
                           "reference_round", "pairs", "bench"});
  RunConfig config;
  if (!j.contains("seed")) throw ConfigError("config needs an explicit top-level 'seed'");
  read(j, "seed", config.seed, "config");
  override_seed(config, config.seed);

  DatasetSpec& d = config.dataset;
  if (j.contains("scene")) {
    const json& s = j.at("scene");
    check_keys(s, "scene", {"landmarks", "extent", "seed"});
    read(s, "landmarks", d.landmark_count, "scene");
    read(s, "extent", d.extent, "scene");
    read(s, "seed", d.scene_seed, "scene");
  }
  if (j.contains("sensor")) {
    d.sensor = parse_sensor(j.at("sensor"));
  }
  if (j.contains("noise")) d.noise = parse_noise(j.at("noise"), d.noise);
  read(j, "doppler", d.doppler_on, "config");
  if (j.contains("route")) {
    const json& r = j.at("route");
    if (!r.is_array()) throw ConfigError("'route' must be a list of [x, y] waypoints");
    for (const json& p : r) d.route.push_back(read_point(p, "route"));
  }
  if (j.contains("rounds")) {
    const json& rounds = j.at("rounds");
    if (!rounds.is_array()) throw ConfigError("'rounds' must be a list");
    for (const json& r : rounds) {
      check_keys(r, "rounds[]", {"name", "speed", "start_offset", "lateral_offset"});
      RoundSpec round;
      read(r, "name", round.name, "rounds[]");
      read(r, "speed", round.speed, "rounds[]");
      read(r, "start_offset", round.start_offset, "rounds[]");
      read(r, "lateral_offset", round.lateral_offset, "rounds[]");
      d.rounds.push_back(round);
    }
  }
  read(j, "reference_round", d.reference_round, "config");
  if (d.reference_round.empty() && !d.rounds.empty()) d.reference_round = d.rounds.front().name;
  if (j.contains("pairs")) {
    const json& p = j.at("pairs");
    check_keys(p, "pairs", {"submap_scans", "max_dist", "stride", "max_pairs"});
    read(p, "submap_scans", d.submap_scans, "pairs");
    read(p, "max_dist", d.loop_max_dist, "pairs");
    read(p, "stride", d.pair_stride, "pairs");
    read(p, "max_pairs", d.max_pairs, "pairs");
  }

  config.bench.pipeline.radar = d.sensor.params;
  if (j.contains("bench")) parse_bench(j.at("bench"), config.bench);
  config.bench.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const json j = parse_json(read_text(path), path.string());
  return run_config_from_json(j);
}

}  // namespace radloc
