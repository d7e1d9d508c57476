#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "radloc/errors.hpp"
#include "radloc/registration.hpp"

namespace radloc {

namespace {

struct CellKey {
  std::int64_t ix;
  std::int64_t iy;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    return std::hash<std::int64_t>()(k.ix * 73856093LL ^ k.iy * 19349663LL);
  }
};

struct Cell {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d information = Eigen::Matrix2d::Zero();
};

class NdtGrid {
 public:
  NdtGrid(const Submap& reference, const NdtConfig& config) : cell_size_(config.cell_size) {
    std::unordered_map<CellKey, std::vector<Eigen::Vector2d>, CellKeyHash> bins;
    for (const CovariantPoint& p : reference.points) {
      const Eigen::Vector2d xy = p.position.head<2>();
      bins[key(xy)].push_back(xy);
    }
    for (const auto& [k, pts] : bins) {
      if (pts.size() < config.min_points) continue;
      Cell cell;
      for (const auto& q : pts) cell.mean += q;
      cell.mean /= static_cast<double>(pts.size());
      Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
      for (const auto& q : pts) cov += (q - cell.mean) * (q - cell.mean).transpose();
      cov /= static_cast<double>(pts.size() - 1);

      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
      Eigen::Vector2d values = eig.eigenvalues();
      const double floor = std::max(config.eigen_ratio * values(1), config.min_variance);
      values = values.cwiseMax(floor);
      cell.information =
          eig.eigenvectors() * values.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
      cells_.emplace(k, cell);
    }
    if (cells_.empty()) {
      throw EmptyGrid("no NDT cell holds " + std::to_string(config.min_points) + " points");
    }
  }

  // Sum of Gaussian likelihoods over the 3x3 block around the point's cell.
  double score(const Eigen::Vector2d& q) const {
    const CellKey center = key(q);
    double total = 0.0;
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find({center.ix + dx, center.iy + dy});
        if (it == cells_.end()) continue;
        const Eigen::Vector2d e = q - it->second.mean;
        total += std::exp(-0.5 * e.dot(it->second.information * e));
      }
    }
    return total;
  }

  std::size_t size() const { return cells_.size(); }

 private:
  CellKey key(const Eigen::Vector2d& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell_size_)),
            static_cast<std::int64_t>(std::floor(p.y() / cell_size_))};
  }

  double cell_size_;
  std::unordered_map<CellKey, Cell, CellKeyHash> cells_;
};

}  // namespace

RegistrationResult ndt_register(const Submap& current, const Submap& previous, const Pose& init,
                                const NdtConfig& config) {
  if (current.points.empty()) throw EmptySubmap("ndt needs a nonempty current submap");
  const NdtGrid grid(previous, config);

  std::vector<Eigen::Vector2d> source;
  source.reserve(current.points.size());
  for (const CovariantPoint& p : current.points) source.emplace_back(p.position.head<2>());

  // Minimized objective: negative total likelihood, parameterized as (x, y, theta).
  auto objective = [&](const Eigen::Vector3d& p) {
    const Pose t(p.z(), p.x(), p.y());
    double total = 0.0;
    for (const auto& q : source) total += grid.score(t * q);
    return -total;
  };

  RegistrationResult result;
  Eigen::Vector3d params(init.x(), init.y(), init.theta());
  double value = objective(params);
  result.cost_history.push_back(value);
  double lambda = 1e-3;
  const double h = config.finite_difference_step;

  while (result.iterations < config.max_iterations) {
    ++result.iterations;
    Eigen::Vector3d grad;
    Eigen::Matrix3d hess;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector3d ei = Eigen::Vector3d::Zero();
      ei(i) = h;
      const double fp = objective(params + ei);
      const double fm = objective(params - ei);
      grad(i) = (fp - fm) / (2.0 * h);
      hess(i, i) = (fp - 2.0 * value + fm) / (h * h);
      for (int j = i + 1; j < 3; ++j) {
        Eigen::Vector3d ej = Eigen::Vector3d::Zero();
        ej(j) = h;
        const double fpp = objective(params + ei + ej);
        const double fpm = objective(params + ei - ej);
        const double fmp = objective(params - ei + ej);
        const double fmm = objective(params - ei - ej);
        hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      }
    }

    bool accepted = false;
    Eigen::Vector3d delta = Eigen::Vector3d::Zero();
    while (lambda < 1e12) {
      // Shift the Hessian until it is positive definite, then take the step.
      Eigen::Matrix3d damped = hess;
      const double scale = std::max(hess.diagonal().cwiseAbs().maxCoeff(), 1e-9);
      damped.diagonal().array() += lambda * scale;
      const Eigen::LLT<Eigen::Matrix3d> llt(damped);
      if (llt.info() != Eigen::Success) {
        lambda *= 10.0;
        continue;
      }
      delta = -llt.solve(grad);
      const double candidate = objective(params + delta);
      if (candidate < value) {
        params += delta;
        params.z() = wrap_angle(params.z());
        value = candidate;
        result.cost_history.push_back(value);
        lambda = std::max(lambda / 10.0, 1e-9);
        accepted = true;
        break;
      }
      if (delta.norm() < config.param_tolerance) break;
      lambda *= 10.0;
    }
    if (!accepted || delta.norm() < config.param_tolerance) {
      result.converged = true;
      break;
    }
  }

  result.transform = Pose(params.z(), params.x(), params.y());
  result.final_cost = value + 9.0 * static_cast<double>(source.size());  // each point scores <= 9
  result.inlier_count = grid.size();
  return result;
}

}  // namespace radloc
