#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "radloc/pose.hpp"
#include "radloc/radar.hpp"
#include "radloc/registration.hpp"
#include "radloc/simulator.hpp"
#include "radloc/submap.hpp"

namespace radloc {

using json = nlohmann::json;

json pose_to_json(const Pose& pose);
Pose pose_from_json(const json& j);

/// {"t", "extrinsic", "ego_v", "detections": [{"r", "phi", "v"}]}.
json scan_to_json(const Scan& scan);
Scan scan_from_json(const json& j);

json submap_to_json(const Submap& submap);
Submap submap_from_json(const json& j);

/// {"theta", "t": [x, y], "iters", "cost", "converged", "inliers"}.
json registration_to_json(const RegistrationResult& result);

json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const json& j);

json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const json& j);

/// Reads a whole file; throws IoError naming the path.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Parses JSON, turning parse failures into ConfigError with the position.
json parse_json(const std::string& text, const std::string& origin);

std::vector<Scan> read_scans_jsonl(const std::filesystem::path& path);
void write_scans_jsonl(const std::filesystem::path& path, const std::vector<Scan>& scans);

/// A dataset held in memory: manifest plus every route's scans and poses.
struct Dataset {
  DatasetManifest manifest;
  std::map<std::string, std::vector<Scan>> scans;
  std::map<std::string, Trajectory> trajectories;

  /// Scans of a range with their poses relative to the range's first scan.
  std::vector<PosedScan> posed_scans(const ScanRange& range) const;
};

Dataset load_dataset(const std::filesystem::path& dir);
Dataset make_dataset(const DatasetManifest& manifest, const std::vector<SimulatedRound>& rounds);

/// Writes a simulated dataset in the on-disk layout.
void write_dataset(const std::filesystem::path& dir, const DatasetManifest& manifest,
                   const std::vector<SimulatedRound>& rounds);

}  // namespace radloc
