#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "radloc/pose.hpp"

namespace radloc {

/// Chirp constants. Only the Doppler-to-range factor beta = f_c / K (seconds)
/// is needed downstream; the chirp form derives it from K = B / T_r.
class RadarParams {
 public:
  RadarParams() = default;
  explicit RadarParams(double beta);

  static RadarParams from_chirp(double center_frequency_hz, double bandwidth_hz,
                                double chirp_duration_s);

  double beta() const { return beta_; }

 private:
  double beta_ = 0.04;
};

/// One polar radar return. Radial velocity follows v = d(range)/dt, so it is
/// negative for a closing target.
struct RadarDetection {
  double range = 0.0;            // m
  double azimuth = 0.0;          // rad, (-pi, pi]
  double radial_velocity = 0.0;  // m/s
  double timestamp = 0.0;        // s
};

struct Scan {
  std::vector<RadarDetection> detections;
  Pose sensor_extrinsic;  // sensor -> body
  std::optional<Eigen::Vector2d> ego_velocity;  // body frame, simulator ground truth
  double timestamp = 0.0;
};

/// r_d = beta * v.
inline double doppler_range_shift(double radial_velocity, const RadarParams& params) {
  return params.beta() * radial_velocity;
}

/// Removes the Doppler range shift: r = r_hat - beta * v.
/// Throws NegativeRange when the restored range would be negative.
RadarDetection compensate(const RadarDetection& det, const RadarParams& params);

/// Forward model used by the simulator: r_hat = r + beta * v.
RadarDetection distort(const RadarDetection& det, const RadarParams& params);

/// (r cos phi, r sin phi, 0).
Eigen::Vector3d polar_to_cartesian(const RadarDetection& det);

}  // namespace radloc
