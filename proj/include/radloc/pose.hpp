#pragma once

#include <Eigen/Core>

namespace radloc {

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Planar rigid transform (SE(2)). Serialized as SE(3) with z = 0 and
/// zero roll/pitch; internally everything stays two-dimensional.
class Pose {
 public:
  Pose() = default;
  Pose(double theta, double x, double y);
  Pose(double theta, const Eigen::Vector2d& translation);

  static Pose identity() { return {}; }

  double theta() const { return theta_; }
  const Eigen::Vector2d& translation() const { return translation_; }
  double x() const { return translation_.x(); }
  double y() const { return translation_.y(); }

  Eigen::Matrix2d rotation() const;

  Pose inverse() const;

  /// this ∘ other: applies `other` first, then `this`.
  Pose operator*(const Pose& other) const;

  Eigen::Vector2d operator*(const Eigen::Vector2d& p) const;

  /// Rotates (x, y), adds translation; z passes through unchanged.
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const;

  /// Homogeneous SE(3) matrix with z = 0.
  Eigen::Matrix4d to_matrix3d() const;

 private:
  double theta_ = 0.0;
  Eigen::Vector2d translation_ = Eigen::Vector2d::Zero();
};

inline Eigen::Vector3d transform_point(const Pose& pose, const Eigen::Vector3d& p) {
  return pose * p;
}

}  // namespace radloc
