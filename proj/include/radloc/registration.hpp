#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "radloc/association.hpp"
#include "radloc/pose.hpp"
#include "radloc/submap.hpp"

namespace radloc {

struct RegistrationResult {
  Pose transform;  // maps current-submap points into the previous submap frame
  std::size_t iterations = 0;
  double final_cost = 0.0;
  bool converged = false;
  std::size_t inlier_count = 0;
  /// Cost after every accepted step, starting with the initial cost.
  std::vector<double> cost_history;
};

struct SolverConfig {
  std::size_t max_iterations = 50;
  double param_tolerance = 1e-8;
  double cost_tolerance = 1e-10;
  double initial_damping = 1e-3;
  double cauchy_scale = 2.0;
  /// Re-evaluate Sigma_y + R Sigma_x R^T at every iterate; when false the
  /// rotation of the initial guess is used throughout.
  bool refresh_covariance = true;

  void validate() const;
};

/// rho(s) = c^2 ln(1 + s / c^2) on a squared (Mahalanobis) distance s.
class CauchyLoss {
 public:
  explicit CauchyLoss(double scale);

  double cost(double squared_distance) const;
  /// d rho / d s; also the IRLS weight.
  double weight(double squared_distance) const;

 private:
  double scale_sq_;
};

struct ResidualTerm {
  Eigen::Vector2d d = Eigen::Vector2d::Zero();  // y - T x
  Eigen::Matrix2d S = Eigen::Matrix2d::Zero();  // Sigma_y + R Sigma_x R^T
};

/// Largest accepted condition number of S.
inline constexpr double kMaxCovarianceCondition = 1e12;

/// Throws SingularCovariance when `cov` is not safely invertible.
Eigen::Matrix2d guarded_inverse(const Eigen::Matrix2d& cov);

ResidualTerm residual(const Pose& transform, const Correspondence& corr, const Submap& current,
                      const Submap& previous);

/// d(y - T x)/d(x, y, theta) for a planar point x.
Eigen::Matrix<double, 2, 3> residual_jacobian(const Pose& transform, const Eigen::Vector2d& x);

/// Uncertainty-aware registration: minimizes sum rho(d^T S^-1 d) over
/// (x, y, theta) by Levenberg-Marquardt. Needs at least three correspondences.
RegistrationResult register_weighted(const Submap& current, const Submap& previous,
                                     std::span<const Correspondence> inliers, const Pose& init,
                                     const SolverConfig& config = {});

/// Same objective with S fixed to the identity.
RegistrationResult register_unweighted(const Submap& current, const Submap& previous,
                                       std::span<const Correspondence> inliers, const Pose& init,
                                       const SolverConfig& config = {});

struct IcpConfig {
  std::size_t max_iterations = 100;
  double tolerance = 1e-10;
  /// Pairs farther than trim_factor * median pair distance are ignored.
  double trim_factor = 3.0;
};

/// Point-to-point ICP on bare planar points.
RegistrationResult icp_align(std::span<const Eigen::Vector2d> source,
                             std::span<const Eigen::Vector2d> target, const Pose& init,
                             const IcpConfig& config = {});

RegistrationResult icp_register(const Submap& current, const Submap& previous, const Pose& init,
                                const IcpConfig& config = {});

struct NdtConfig {
  double cell_size = 5.0;  // m
  std::size_t min_points = 3;
  /// Smallest eigenvalue is lifted to at least eigen_ratio * largest ...
  double eigen_ratio = 1e-3;
  /// ... and to at least this absolute floor (m^2).
  double min_variance = 0.04;
  std::size_t max_iterations = 50;
  double param_tolerance = 1e-9;
  double finite_difference_step = 1e-5;
};

/// Grid NDT: maximizes the summed Gaussian likelihood of the transformed
/// current points under per-cell normal distributions of the previous submap.
RegistrationResult ndt_register(const Submap& current, const Submap& previous, const Pose& init,
                                const NdtConfig& config = {});

/// T_p^w * T_b^p.
inline Pose compose_global(const Pose& previous_to_world, const Pose& body_to_previous) {
  return previous_to_world * body_to_previous;
}

}  // namespace radloc
