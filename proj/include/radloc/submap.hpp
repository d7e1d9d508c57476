#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "radloc/pose.hpp"
#include "radloc/radar.hpp"
#include "radloc/uncertainty.hpp"

namespace radloc {

/// Annular-ring histogram parameters for the radial statistics descriptor.
struct DescriptorConfig {
  std::size_t ring_count = 16;
  double ring_width = 2.5;  // m

  double neighbor_radius() const { return static_cast<double>(ring_count) * ring_width; }
  void validate() const;
};

/// A scan together with its body pose relative to the submap anchor.
struct PosedScan {
  Scan scan;
  Pose relative_pose;
};

struct SubmapOptions {
  bool compensate = true;
  PolarNoise noise;
};

struct Submap {
  std::vector<CovariantPoint> points;      // anchor frame
  std::vector<Eigen::VectorXd> descriptors;  // filled by describe()
  Pose anchor_pose;                        // world pose of the anchor
  double mean_ego_speed = 0.0;             // m/s
  std::size_t scan_count = 0;
  std::size_t dropped_count = 0;
  /// Raw detections with their relative poses; baselines that redo the
  /// compensation rebuild from these.
  std::vector<PosedScan> sources;

  bool described() const { return !points.empty() && descriptors.size() == points.size(); }
};

/// Stacks the scans into the anchor frame. Each detection is optionally
/// Doppler-compensated, turned into a covariant Cartesian point, moved by the
/// sensor extrinsic and then by the scan's relative pose. Detections whose
/// compensated range is negative are dropped and counted.
/// Throws EmptySubmap when nothing survives (or the input is empty).
Submap build_submap(std::span<const PosedScan> scans, const RadarParams& params,
                    const SubmapOptions& options = {}, const Pose& anchor_pose = {});

/// Fills the per-point descriptor: descriptor[k] is the share of the other
/// points whose planar distance falls in ring k. Points without neighbors in
/// range get the uniform vector.
Submap describe(Submap submap, const DescriptorConfig& config = {});

/// Same computation on a bare point set.
std::vector<Eigen::VectorXd> radial_statistics(std::span<const CovariantPoint> points,
                                               const DescriptorConfig& config);

}  // namespace radloc
