#include "radloc/radar.hpp"

#include <cmath>
#include <string>

#include "radloc/errors.hpp"

namespace radloc {

RadarParams::RadarParams(double beta) : beta_(beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ConfigError("radar beta must be positive and finite, got " + std::to_string(beta));
  }
}

RadarParams RadarParams::from_chirp(double center_frequency_hz, double bandwidth_hz,
                                    double chirp_duration_s) {
  if (!(center_frequency_hz > 0.0 && bandwidth_hz > 0.0 && chirp_duration_s > 0.0)) {
    throw ConfigError("chirp constants must be positive");
  }
  // beta = f_c / K with ramp rate K = B / T_r.
  return RadarParams(center_frequency_hz * chirp_duration_s / bandwidth_hz);
}

namespace {

RadarDetection shifted(const RadarDetection& det, double new_range) {
  if (new_range < 0.0) {
    throw NegativeRange("range " + std::to_string(det.range) + " with radial velocity " +
                        std::to_string(det.radial_velocity) + " maps to negative range " +
                        std::to_string(new_range));
  }
  RadarDetection out = det;
  out.range = new_range;
  return out;
}

}  // namespace

RadarDetection compensate(const RadarDetection& det, const RadarParams& params) {
  return shifted(det, det.range - doppler_range_shift(det.radial_velocity, params));
}

RadarDetection distort(const RadarDetection& det, const RadarParams& params) {
  return shifted(det, det.range + doppler_range_shift(det.radial_velocity, params));
}

Eigen::Vector3d polar_to_cartesian(const RadarDetection& det) {
  return {det.range * std::cos(det.azimuth), det.range * std::sin(det.azimuth), 0.0};
}

}  // namespace radloc
