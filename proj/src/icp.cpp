#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "radloc/errors.hpp"
#include "radloc/registration.hpp"

namespace radloc {

namespace {

std::vector<Eigen::Vector2d> planar_points(const Submap& submap) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(submap.points.size());
  for (const CovariantPoint& p : submap.points) out.emplace_back(p.position.head<2>());
  return out;
}

}  // namespace

RegistrationResult icp_align(std::span<const Eigen::Vector2d> source,
                             std::span<const Eigen::Vector2d> target, const Pose& init,
                             const IcpConfig& config) {
  if (source.empty() || target.empty()) throw EmptySubmap("icp needs two nonempty point sets");

  RegistrationResult result;
  Pose estimate = init;
  std::vector<std::size_t> nearest(source.size());
  std::vector<double> distance(source.size());
  std::vector<Eigen::Vector2d> moved(source.size());

  while (result.iterations < config.max_iterations) {
    ++result.iterations;
    for (std::size_t i = 0; i < source.size(); ++i) {
      moved[i] = estimate * source[i];
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < target.size(); ++j) {
        const double d = (target[j] - moved[i]).squaredNorm();
        if (d < best) {
          best = d;
          best_j = j;
        }
      }
      nearest[i] = best_j;
      distance[i] = std::sqrt(best);
    }

    std::vector<double> sorted = distance;
    const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
    std::nth_element(sorted.begin(), mid, sorted.end());
    const double cutoff = config.trim_factor * *mid;

    std::vector<Eigen::Vector2d> src;
    std::vector<Eigen::Vector2d> dst;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i) {
      if (distance[i] > cutoff) continue;
      src.push_back(moved[i]);
      dst.push_back(target[nearest[i]]);
      sq_sum += distance[i] * distance[i];
    }
    result.inlier_count = src.size();
    result.final_cost = src.empty() ? 0.0 : sq_sum / static_cast<double>(src.size());
    result.cost_history.push_back(result.final_cost);
    if (src.size() < 2) break;

    const Pose increment = fit_rigid(src, dst);
    estimate = increment * estimate;
    if (increment.translation().norm() + std::abs(increment.theta()) < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.transform = estimate;
  return result;
}

RegistrationResult icp_register(const Submap& current, const Submap& previous, const Pose& init,
                                const IcpConfig& config) {
  const auto source = planar_points(current);
  const auto target = planar_points(previous);
  return icp_align(source, target, init, config);
}

}  // namespace radloc
