#include "radloc/submap.hpp"

#include <cmath>

#include "radloc/errors.hpp"

namespace radloc {

void DescriptorConfig::validate() const {
  if (ring_count < 2) throw ConfigError("descriptor ring_count must be at least 2");
  if (!(ring_width > 0.0)) throw ConfigError("descriptor ring_width must be positive");
}

Submap build_submap(std::span<const PosedScan> scans, const RadarParams& params,
                    const SubmapOptions& options, const Pose& anchor_pose) {
  if (scans.empty()) throw EmptySubmap("cannot build a submap from zero scans");

  Submap submap;
  submap.anchor_pose = anchor_pose;
  submap.scan_count = scans.size();
  submap.sources.assign(scans.begin(), scans.end());

  double speed_sum = 0.0;
  std::size_t speed_count = 0;
  for (const PosedScan& posed : scans) {
    if (posed.scan.ego_velocity) {
      speed_sum += posed.scan.ego_velocity->norm();
      ++speed_count;
    }
    const Pose to_anchor = posed.relative_pose * posed.scan.sensor_extrinsic;
    const Eigen::Matrix2d rot = to_anchor.rotation();
    for (const RadarDetection& det : posed.scan.detections) {
      RadarDetection measured = det;
      if (!options.compensate) {
        // The Jacobian still sees the velocity; zeroing it keeps the point at
        // the measured range.
        measured.radial_velocity = 0.0;
      }
      CovariantPoint p;
      try {
        p = propagate_covariance(measured, options.noise, params);
      } catch (const NegativeRange&) {
        ++submap.dropped_count;
        continue;
      }
      p.position = to_anchor * p.position;
      p.covariance = rot * p.covariance * rot.transpose();
      submap.points.push_back(p);
    }
  }
  if (speed_count > 0) submap.mean_ego_speed = speed_sum / static_cast<double>(speed_count);

  if (submap.points.empty()) {
    throw EmptySubmap("all " + std::to_string(submap.dropped_count) +
                      " detections were dropped");
  }
  return submap;
}

std::vector<Eigen::VectorXd> radial_statistics(std::span<const CovariantPoint> points,
                                               const DescriptorConfig& config) {
  config.validate();
  const std::size_t n = points.size();
  const std::size_t rings = config.ring_count;
  const double radius = config.neighbor_radius();
  const double radius_sq = radius * radius;

  std::vector<Eigen::VectorXd> out(n, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rings)));
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d pi = points[i].position.head<2>();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Eigen::Vector2d diff = points[j].position.head<2>() - pi;
      const double d_sq = diff.squaredNorm();
      if (d_sq >= radius_sq) continue;
      const auto ring = static_cast<std::size_t>(std::sqrt(d_sq) / config.ring_width);
      if (ring >= rings) continue;
      out[i][static_cast<Eigen::Index>(ring)] += 1.0;
      out[j][static_cast<Eigen::Index>(ring)] += 1.0;
    }
  }
  for (Eigen::VectorXd& d : out) {
    const double total = d.sum();
    if (total > 0.0) {
      d /= total;
    } else {
      d.setConstant(1.0 / static_cast<double>(rings));
    }
  }
  return out;
}

Submap describe(Submap submap, const DescriptorConfig& config) {
  submap.descriptors = radial_statistics(submap.points, config);
  return submap;
}

}  // namespace radloc
