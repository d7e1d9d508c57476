#include "radloc/pose.hpp"

#include <cmath>
#include <numbers>

namespace radloc {

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, kTwoPi);  // [-pi, pi]
  if (wrapped <= -std::numbers::pi) wrapped += kTwoPi;
  return wrapped;
}

Pose::Pose(double theta, double x, double y) : theta_(wrap_angle(theta)), translation_(x, y) {}

Pose::Pose(double theta, const Eigen::Vector2d& translation)
    : theta_(wrap_angle(theta)), translation_(translation) {}

Eigen::Matrix2d Pose::rotation() const {
  const double c = std::cos(theta_);
  const double s = std::sin(theta_);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Pose Pose::inverse() const {
  const Eigen::Matrix2d rt = rotation().transpose();
  return {-theta_, -(rt * translation_)};
}

Pose Pose::operator*(const Pose& other) const {
  return {theta_ + other.theta_, rotation() * other.translation_ + translation_};
}

Eigen::Vector2d Pose::operator*(const Eigen::Vector2d& p) const {
  return rotation() * p + translation_;
}

Eigen::Vector3d Pose::operator*(const Eigen::Vector3d& p) const {
  const Eigen::Vector2d xy = rotation() * p.head<2>() + translation_;
  return {xy.x(), xy.y(), p.z()};
}

Eigen::Matrix4d Pose::to_matrix3d() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<2, 2>() = rotation();
  m(0, 3) = translation_.x();
  m(1, 3) = translation_.y();
  return m;
}

}  // namespace radloc
