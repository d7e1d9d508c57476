#include "radloc/uncertainty.hpp"

#include <cmath>

#include "radloc/errors.hpp"

namespace radloc {

void PolarNoise::validate() const {
  if (!(sigma_range >= 0.0 && sigma_velocity >= 0.0 && sigma_azimuth >= 0.0)) {
    throw ConfigError("polar noise standard deviations must be nonnegative");
  }
}

Eigen::Vector3d compensated_cartesian(const RadarDetection& det, const RadarParams& params) {
  return polar_to_cartesian(compensate(det, params));
}

Eigen::Matrix3d jacobian(const RadarDetection& det, const RadarParams& params) {
  const double beta = params.beta();
  const double c = std::cos(det.azimuth);
  const double s = std::sin(det.azimuth);
  const double restored = det.range - beta * det.radial_velocity;
  Eigen::Matrix3d j;
  j << c, -beta * c, -restored * s,
       s, -beta * s, restored * c,
       0.0, 0.0, 0.0;
  return j;
}

CovariantPoint propagate_covariance(const RadarDetection& det, const PolarNoise& noise,
                                    const RadarParams& params) {
  CovariantPoint out;
  out.position = compensated_cartesian(det, params);

  const Eigen::Matrix<double, 2, 3> j = jacobian(det, params).topRows<2>();
  const Eigen::Vector3d variances(noise.sigma_range * noise.sigma_range,
                                  noise.sigma_velocity * noise.sigma_velocity,
                                  noise.sigma_azimuth * noise.sigma_azimuth);
  const Eigen::Matrix2d cov = j * variances.asDiagonal() * j.transpose();
  out.covariance = 0.5 * (cov + cov.transpose());
  return out;
}

}  // namespace radloc
