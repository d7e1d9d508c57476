#pragma once

#include <numbers>

#include <Eigen/Core>

#include "radloc/radar.hpp"

namespace radloc {

/// Diagonal polar measurement noise (standard deviations).
struct PolarNoise {
  double sigma_range = 0.25;                        // m
  double sigma_velocity = 0.1;                      // m/s
  double sigma_azimuth = 0.5 * std::numbers::pi / 180.0;  // rad

  void validate() const;
};

/// Cartesian point (z = 0) with the planar block of its covariance.
struct CovariantPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
};

/// ((r - beta v) cos phi, (r - beta v) sin phi, 0). Throws NegativeRange.
Eigen::Vector3d compensated_cartesian(const RadarDetection& det, const RadarParams& params);

/// Jacobian of compensated_cartesian with respect to (r, v, phi). The third
/// row is identically zero.
Eigen::Matrix3d jacobian(const RadarDetection& det, const RadarParams& params);

/// First-order propagation J diag(sr^2, sv^2, sphi^2) J^T, keeping the planar
/// 2x2 block only.
CovariantPoint propagate_covariance(const RadarDetection& det, const PolarNoise& noise,
                                    const RadarParams& params);

}  // namespace radloc
