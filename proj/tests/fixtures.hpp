#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "radloc/association.hpp"
#include "radloc/submap.hpp"

namespace radloc::testing {

inline std::vector<Eigen::Vector2d> random_cloud(std::size_t n, double extent,
                                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-extent, extent);
  std::vector<Eigen::Vector2d> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(u(rng), u(rng));
  return out;
}

inline Submap submap_from(const std::vector<Eigen::Vector2d>& points,
                          const Eigen::Matrix2d& cov = Eigen::Matrix2d::Identity() * 0.01) {
  Submap s;
  s.scan_count = 1;
  for (const Eigen::Vector2d& p : points) s.points.push_back({{p.x(), p.y(), 0.0}, cov});
  return s;
}

// Applies `pose` to every point: the result is the "previous" cloud y = T x.
inline std::vector<Eigen::Vector2d> moved(const std::vector<Eigen::Vector2d>& points,
                                          const Pose& pose) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(points.size());
  for (const Eigen::Vector2d& p : points) out.push_back(pose * p);
  return out;
}

inline std::vector<Correspondence> identity_pairs(std::size_t n) {
  std::vector<Correspondence> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({i, i});
  return out;
}

inline double trans_err(const Pose& a, const Pose& b) {
  return (a.translation() - b.translation()).norm();
}

inline double rot_err(const Pose& a, const Pose& b) {
  return std::abs(wrap_angle(a.theta() - b.theta()));
}

}  // namespace radloc::testing
