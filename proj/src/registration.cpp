#include "radloc/registration.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "radloc/errors.hpp"

namespace radloc {

void SolverConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("solver max_iterations must be at least 1");
  if (!(param_tolerance > 0.0) || !(cost_tolerance > 0.0)) {
    throw ConfigError("solver tolerances must be positive");
  }
  if (!(initial_damping > 0.0)) throw ConfigError("solver initial_damping must be positive");
  if (!(cauchy_scale > 0.0)) throw ConfigError("solver cauchy_scale must be positive");
}

CauchyLoss::CauchyLoss(double scale) : scale_sq_(scale * scale) {
  if (!(scale > 0.0)) throw ConfigError("cauchy scale must be positive");
}

double CauchyLoss::cost(double squared_distance) const {
  return scale_sq_ * std::log1p(squared_distance / scale_sq_);
}

double CauchyLoss::weight(double squared_distance) const {
  return 1.0 / (1.0 + squared_distance / scale_sq_);
}

Eigen::Matrix2d guarded_inverse(const Eigen::Matrix2d& cov) {
  const Eigen::Matrix2d sym = 0.5 * (cov + cov.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(sym, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(1);
  if (!(lo > 0.0) || hi > kMaxCovarianceCondition * lo) {
    throw SingularCovariance("combined covariance is singular (eigenvalues " +
                             std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
  const double det = sym(0, 0) * sym(1, 1) - sym(0, 1) * sym(1, 0);
  Eigen::Matrix2d inv;
  inv << sym(1, 1), -sym(0, 1), -sym(1, 0), sym(0, 0);
  return inv / det;
}

ResidualTerm residual(const Pose& transform, const Correspondence& corr, const Submap& current,
                      const Submap& previous) {
  const CovariantPoint& x = current.points.at(corr.index_x);
  const CovariantPoint& y = previous.points.at(corr.index_y);
  const Eigen::Matrix2d r = transform.rotation();
  ResidualTerm term;
  term.d = y.position.head<2>() - (r * x.position.head<2>() + transform.translation());
  term.S = y.covariance + r * x.covariance * r.transpose();
  guarded_inverse(term.S);
  return term;
}

Eigen::Matrix<double, 2, 3> residual_jacobian(const Pose& transform, const Eigen::Vector2d& x) {
  const double c = std::cos(transform.theta());
  const double s = std::sin(transform.theta());
  Eigen::Matrix<double, 2, 3> j;
  // d = y - R x - t, dR/dtheta = [[-s, -c], [c, -s]].
  j << -1.0, 0.0, s * x.x() + c * x.y(),
       0.0, -1.0, -c * x.x() + s * x.y();
  return j;
}

namespace {

struct Problem {
  const Submap& current;
  const Submap& previous;
  std::span<const Correspondence> corrs;
  bool weighted;
  CauchyLoss loss;
  bool refresh;
  Eigen::Matrix2d frozen_rotation;

  // Information matrices S^-1 under `t` (identity when unweighted).
  std::vector<Eigen::Matrix2d> information(const Pose& t) const {
    std::vector<Eigen::Matrix2d> info(corrs.size(), Eigen::Matrix2d::Identity());
    if (!weighted) return info;
    const Eigen::Matrix2d r = refresh ? t.rotation() : frozen_rotation;
    for (std::size_t i = 0; i < corrs.size(); ++i) {
      const Eigen::Matrix2d& sx = current.points[corrs[i].index_x].covariance;
      const Eigen::Matrix2d& sy = previous.points[corrs[i].index_y].covariance;
      info[i] = guarded_inverse(sy + r * sx * r.transpose());
    }
    return info;
  }

  Eigen::Vector2d diff(const Pose& t, std::size_t i) const {
    const Eigen::Vector2d x = current.points[corrs[i].index_x].position.head<2>();
    const Eigen::Vector2d y = previous.points[corrs[i].index_y].position.head<2>();
    return y - t * x;
  }

  double cost(const Pose& t) const {
    const auto info = information(t);
    double total = 0.0;
    for (std::size_t i = 0; i < corrs.size(); ++i) {
      const Eigen::Vector2d d = diff(t, i);
      total += loss.cost(d.dot(info[i] * d));
    }
    return total;
  }
};

Pose step_pose(const Pose& t, const Eigen::Vector3d& delta) {
  return {t.theta() + delta.z(), t.x() + delta.x(), t.y() + delta.y()};
}

RegistrationResult solve(const Problem& problem, const Pose& init, const SolverConfig& config) {
  RegistrationResult result;
  result.inlier_count = problem.corrs.size();
  Pose current = init;
  double cost = problem.cost(current);
  result.cost_history.push_back(cost);
  double lambda = config.initial_damping;

  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
  while (result.iterations < config.max_iterations) {
    if (cost == 0.0) {
      result.converged = true;
      break;
    }
    ++result.iterations;

    const auto info = problem.information(current);
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    gradient.setZero();
    for (std::size_t i = 0; i < problem.corrs.size(); ++i) {
      const Eigen::Vector2d x = problem.current.points[problem.corrs[i].index_x].position.head<2>();
      const Eigen::Vector2d d = problem.diff(current, i);
      const double w = problem.loss.weight(d.dot(info[i] * d));
      const Eigen::Matrix<double, 2, 3> j = residual_jacobian(current, x);
      const Eigen::Matrix<double, 3, 2> jt_info = j.transpose() * info[i];
      h.noalias() += w * jt_info * j;
      gradient.noalias() += w * jt_info * d;
    }

    Eigen::Matrix3d damped = h;
    for (int k = 0; k < 3; ++k) damped(k, k) += lambda * std::max(h(k, k), 1e-12);
    const Eigen::Vector3d delta = -damped.ldlt().solve(gradient);
    const Pose candidate = step_pose(current, delta);

    double candidate_cost = std::numeric_limits<double>::infinity();
    try {
      candidate_cost = problem.cost(candidate);
    } catch (const SingularCovariance&) {
      // treated as a rejected step
    }

    if (candidate_cost < cost) {
      const double decrease = (cost - candidate_cost) / cost;
      current = candidate;
      cost = candidate_cost;
      result.cost_history.push_back(cost);
      lambda = std::max(lambda / 10.0, 1e-12);
      if (delta.norm() < config.param_tolerance || decrease < config.cost_tolerance) {
        result.converged = true;
        break;
      }
    } else {
      if (delta.norm() < config.param_tolerance) {
        // The step is already below tolerance; no representable decrease left.
        result.converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e16) {
        result.converged = gradient.norm() <= 1e-6 * (1.0 + cost);
        break;
      }
    }
  }
  result.transform = current;
  result.final_cost = cost;
  return result;
}

RegistrationResult run(const Submap& current, const Submap& previous,
                       std::span<const Correspondence> inliers, const Pose& init,
                       const SolverConfig& config, bool weighted) {
  config.validate();
  if (inliers.size() < 3) {
    throw InsufficientInliers("registration needs at least 3 correspondences, got " +
                              std::to_string(inliers.size()));
  }
  for (const Correspondence& c : inliers) {
    if (c.index_x >= current.points.size() || c.index_y >= previous.points.size()) {
      throw InsufficientInliers("correspondence index out of range");
    }
  }
  const Problem problem{current,  previous, inliers, weighted, CauchyLoss(config.cauchy_scale),
                        config.refresh_covariance, init.rotation()};
  return solve(problem, init, config);
}

}  // namespace

RegistrationResult register_weighted(const Submap& current, const Submap& previous,
                                     std::span<const Correspondence> inliers, const Pose& init,
                                     const SolverConfig& config) {
  return run(current, previous, inliers, init, config, true);
}

RegistrationResult register_unweighted(const Submap& current, const Submap& previous,
                                       std::span<const Correspondence> inliers, const Pose& init,
                                       const SolverConfig& config) {
  return run(current, previous, inliers, init, config, false);
}

}  // namespace radloc
