#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "radloc/pose.hpp"
#include "radloc/submap.hpp"

namespace radloc {

/// Index pair into (current, previous). Covariances are looked up in the
/// submaps, never copied.
struct Correspondence {
  std::size_t index_x = 0;  // current submap
  std::size_t index_y = 0;  // previous submap

  friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

struct MatchConfig {
  /// Candidates per point on each side of the mutual check.
  std::size_t k = 1;
};

struct RansacConfig {
  std::size_t iterations = 500;
  double inlier_threshold = 1.0;  // m
  std::size_t min_inliers = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RansacResult {
  std::vector<Correspondence> inliers;
  Pose coarse_transform;
};

/// Mutual nearest neighbours in descriptor space (L2). Ties go to the lower
/// index. Throws NoMatches when the mutual check leaves nothing.
std::vector<Correspondence> match_descriptors(const Submap& current, const Submap& previous,
                                              const MatchConfig& config = {});

/// Exact planar rigid transform mapping (x1, x2) onto (y1, y2). Rotation comes
/// from the segment directions, translation aligns the midpoints.
/// Throws DegenerateSample when either pair of points coincides.
Pose solve_two_point(const Eigen::Vector2d& x1, const Eigen::Vector2d& x2,
                     const Eigen::Vector2d& y1, const Eigen::Vector2d& y2);

/// Weighted least-squares planar rigid fit y ~ R x + t (no scale).
/// Empty `weights` means uniform.
Pose fit_rigid(std::span<const Eigen::Vector2d> source, std::span<const Eigen::Vector2d> target,
               std::span<const double> weights = {});

/// Two-point RANSAC over candidate correspondences followed by a least-squares
/// refit on the consensus set. Every returned inlier has residual below the
/// threshold under the returned transform.
RansacResult ransac_rigid(std::span<const Correspondence> candidates, const Submap& current,
                          const Submap& previous, const RansacConfig& config = {});

}  // namespace radloc
