#include "radloc/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "radloc/errors.hpp"

namespace radloc {

namespace {

double finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw ConfigError(std::string("non-finite value for '") + what + "'");
  }
  return value;
}

double number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw ConfigError(std::string("missing or non-numeric field '") + key + "'");
  }
  return finite(it->get<double>(), key);
}

Eigen::Vector2d vec2(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(std::string("'") + what + "' must be a two-element numeric array");
  }
  return {finite(j[0].get<double>(), what), finite(j[1].get<double>(), what)};
}

json vec2_json(const Eigen::Vector2d& v) {
  return json::array({finite(v.x(), "vector"), finite(v.y(), "vector")});
}

const json& member(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("missing field '") + key + "'");
  return *it;
}

json range_to_json(const ScanRange& r) {
  return {{"route", r.route}, {"begin", r.begin}, {"end", r.end}};
}

ScanRange range_from_json(const json& j) {
  ScanRange r;
  r.route = member(j, "route").get<std::string>();
  r.begin = member(j, "begin").get<std::size_t>();
  r.end = member(j, "end").get<std::size_t>();
  if (r.end <= r.begin) throw ConfigError("scan range must be nonempty");
  return r;
}

}  // namespace

json pose_to_json(const Pose& pose) {
  return {{"theta", finite(pose.theta(), "theta")},
          {"x", finite(pose.x(), "x")},
          {"y", finite(pose.y(), "y")}};
}

Pose pose_from_json(const json& j) {
  return {number(j, "theta"), number(j, "x"), number(j, "y")};
}

json scan_to_json(const Scan& scan) {
  json dets = json::array();
  for (const RadarDetection& d : scan.detections) {
    dets.push_back({{"r", finite(d.range, "r")},
                    {"phi", finite(d.azimuth, "phi")},
                    {"v", finite(d.radial_velocity, "v")}});
  }
  json j = {{"t", finite(scan.timestamp, "t")}, {"extrinsic", pose_to_json(scan.sensor_extrinsic)}};
  if (scan.ego_velocity) j["ego_v"] = vec2_json(*scan.ego_velocity);
  j["detections"] = std::move(dets);
  return j;
}

Scan scan_from_json(const json& j) {
  Scan scan;
  scan.timestamp = number(j, "t");
  if (j.contains("extrinsic")) scan.sensor_extrinsic = pose_from_json(j.at("extrinsic"));
  if (j.contains("ego_v")) scan.ego_velocity = vec2(j.at("ego_v"), "ego_v");
  for (const json& d : member(j, "detections")) {
    RadarDetection det;
    det.range = number(d, "r");
    det.azimuth = number(d, "phi");
    det.radial_velocity = number(d, "v");
    det.timestamp = scan.timestamp;
    if (det.range < 0.0) throw ConfigError("detection range must be nonnegative");
    scan.detections.push_back(det);
  }
  return scan;
}

json submap_to_json(const Submap& submap) {
  json points = json::array();
  for (const CovariantPoint& p : submap.points) {
    points.push_back({{"p", vec2_json(p.position.head<2>())},
                      {"cov", json::array({p.covariance(0, 0), p.covariance(0, 1),
                                           p.covariance(1, 1)})}});
  }
  json descriptors = json::array();
  for (const Eigen::VectorXd& d : submap.descriptors) {
    descriptors.push_back(std::vector<double>(d.data(), d.data() + d.size()));
  }
  return {{"anchor", pose_to_json(submap.anchor_pose)},
          {"mean_speed", submap.mean_ego_speed},
          {"points", std::move(points)},
          {"descriptors", std::move(descriptors)}};
}

Submap submap_from_json(const json& j) {
  Submap submap;
  submap.anchor_pose = pose_from_json(member(j, "anchor"));
  submap.mean_ego_speed = number(j, "mean_speed");
  submap.scan_count = 1;
  for (const json& p : member(j, "points")) {
    CovariantPoint cp;
    const Eigen::Vector2d xy = vec2(member(p, "p"), "p");
    cp.position = {xy.x(), xy.y(), 0.0};
    const json& cov = member(p, "cov");
    if (!cov.is_array() || cov.size() != 3) throw ConfigError("'cov' must hold [sxx, sxy, syy]");
    cp.covariance << cov[0].get<double>(), cov[1].get<double>(), cov[1].get<double>(),
        cov[2].get<double>();
    submap.points.push_back(cp);
  }
  if (j.contains("descriptors")) {
    for (const json& d : j.at("descriptors")) {
      const auto values = d.get<std::vector<double>>();
      submap.descriptors.emplace_back(
          Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
    }
  }
  return submap;
}

json registration_to_json(const RegistrationResult& result) {
  return {{"theta", result.transform.theta()},
          {"t", vec2_json(result.transform.translation())},
          {"iters", result.iterations},
          {"cost", result.final_cost},
          {"converged", result.converged},
          {"inliers", result.inlier_count}};
}

json trajectory_to_json(const Trajectory& traj) {
  json samples = json::array();
  for (const TrajectorySample& s : traj.samples) {
    samples.push_back({{"t", s.t},
                       {"theta", s.pose.theta()},
                       {"x", s.pose.x()},
                       {"y", s.pose.y()},
                       {"speed", s.speed}});
  }
  return {{"route", traj.route}, {"samples", std::move(samples)}};
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory traj;
  traj.route = member(j, "route").get<std::string>();
  for (const json& s : member(j, "samples")) {
    traj.samples.push_back(
        {number(s, "t"), Pose(number(s, "theta"), number(s, "x"), number(s, "y")),
         number(s, "speed")});
  }
  return traj;
}

json manifest_to_json(const DatasetManifest& manifest) {
  json pairs = json::array();
  for (const LoopPair& p : manifest.pairs) {
    pairs.push_back({{"id", p.id},
                     {"a", range_to_json(p.current)},
                     {"b", range_to_json(p.previous)},
                     {"gt", pose_to_json(p.ground_truth)},
                     {"dv", p.velocity_diff}});
  }
  return {{"routes", manifest.routes}, {"pairs", std::move(pairs)}};
}

DatasetManifest manifest_from_json(const json& j) {
  DatasetManifest manifest;
  manifest.routes = member(j, "routes").get<std::vector<std::string>>();
  for (const json& p : member(j, "pairs")) {
    LoopPair pair;
    pair.id = member(p, "id").get<std::size_t>();
    pair.current = range_from_json(member(p, "a"));
    pair.previous = range_from_json(member(p, "b"));
    pair.ground_truth = pose_from_json(member(p, "gt"));
    pair.velocity_diff = number(p, "dv");
    manifest.pairs.push_back(pair);
  }
  return manifest;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

std::vector<Scan> read_scans_jsonl(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<Scan> scans;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string origin = path.string() + ":" + std::to_string(line_no);
    try {
      scans.push_back(scan_from_json(parse_json(line, origin)));
    } catch (const json::exception& e) {
      throw ConfigError(origin + ": " + e.what());
    }
  }
  return scans;
}

void write_scans_jsonl(const std::filesystem::path& path, const std::vector<Scan>& scans) {
  std::string text;
  for (const Scan& s : scans) {
    text += scan_to_json(s).dump();
    text += '\n';
  }
  write_text(path, text);
}

std::vector<PosedScan> Dataset::posed_scans(const ScanRange& range) const {
  const auto scan_it = scans.find(range.route);
  const auto traj_it = trajectories.find(range.route);
  if (scan_it == scans.end() || traj_it == trajectories.end()) {
    throw ConfigError("dataset has no route '" + range.route + "'");
  }
  const auto& route_scans = scan_it->second;
  const auto& samples = traj_it->second.samples;
  if (range.end > route_scans.size() || range.end > samples.size() || range.begin >= range.end) {
    throw ConfigError("scan range [" + std::to_string(range.begin) + ", " +
                      std::to_string(range.end) + ") out of bounds for route '" + range.route +
                      "'");
  }
  const Pose anchor_inv = samples[range.begin].pose.inverse();
  std::vector<PosedScan> out;
  out.reserve(range.end - range.begin);
  for (std::size_t k = range.begin; k < range.end; ++k) {
    out.push_back({route_scans[k], anchor_inv * samples[k].pose});
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  const auto manifest_path = dir / "manifest.json";
  try {
    ds.manifest = manifest_from_json(parse_json(read_text(manifest_path), manifest_path.string()));
    for (const std::string& route : ds.manifest.routes) {
      ds.scans[route] = read_scans_jsonl(dir / ("scans_" + route + ".jsonl"));
      const auto poses_path = dir / ("poses_" + route + ".json");
      ds.trajectories[route] =
          trajectory_from_json(parse_json(read_text(poses_path), poses_path.string()));
    }
  } catch (const json::exception& e) {
    throw ConfigError(dir.string() + ": " + e.what());
  }
  return ds;
}

Dataset make_dataset(const DatasetManifest& manifest, const std::vector<SimulatedRound>& rounds) {
  Dataset ds;
  ds.manifest = manifest;
  for (const SimulatedRound& r : rounds) {
    ds.scans[r.trajectory.route] = r.scans;
    ds.trajectories[r.trajectory.route] = r.trajectory;
  }
  return ds;
}

void write_dataset(const std::filesystem::path& dir, const DatasetManifest& manifest,
                   const std::vector<SimulatedRound>& rounds) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  for (const SimulatedRound& r : rounds) {
    write_scans_jsonl(dir / ("scans_" + r.trajectory.route + ".jsonl"), r.scans);
    write_text(dir / ("poses_" + r.trajectory.route + ".json"),
               trajectory_to_json(r.trajectory).dump(2) + "\n");
  }
  write_text(dir / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
}

DatasetManifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir) {
  const auto rounds = simulate_rounds(spec);
  DatasetManifest manifest = build_manifest(spec, rounds);
  write_dataset(out_dir, manifest, rounds);
  return manifest;
}

}  // namespace radloc
