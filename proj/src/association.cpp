#include "radloc/association.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "radloc/errors.hpp"
#include "radloc/random.hpp"

namespace radloc {

void RansacConfig::validate() const {
  if (iterations < 1) throw ConfigError("ransac iterations must be at least 1");
  if (!(inlier_threshold > 0.0)) throw ConfigError("ransac inlier_threshold must be positive");
}

namespace {

// Indices of the k smallest entries of `row`, ties to the lower index.
std::vector<std::size_t> k_smallest(const std::vector<double>& row, std::size_t k) {
  std::vector<std::size_t> idx(row.size());
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return row[a] < row[b] || (row[a] == row[b] && a < b);
                    });
  idx.resize(k);
  return idx;
}

Eigen::Vector2d planar(const CovariantPoint& p) { return p.position.head<2>(); }

}  // namespace

std::vector<Correspondence> match_descriptors(const Submap& current, const Submap& previous,
                                              const MatchConfig& config) {
  if (!current.described() || !previous.described()) {
    throw NoMatches("both submaps must be described before matching");
  }
  const std::size_t n = current.descriptors.size();
  const std::size_t m = previous.descriptors.size();
  const std::size_t k = std::max<std::size_t>(config.k, 1);

  std::vector<std::vector<double>> dist(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      dist[i][j] = (current.descriptors[i] - previous.descriptors[j]).squaredNorm();
    }
  }

  std::vector<std::vector<std::size_t>> reverse(m);
  {
    std::vector<double> column(n);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) column[i] = dist[i][j];
      reverse[j] = k_smallest(column, k);
    }
  }

  std::vector<Correspondence> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : k_smallest(dist[i], k)) {
      const auto& back = reverse[j];
      if (std::find(back.begin(), back.end(), i) != back.end()) out.push_back({i, j});
    }
  }
  if (out.empty()) throw NoMatches("mutual descriptor check left no correspondences");
  return out;
}

Pose solve_two_point(const Eigen::Vector2d& x1, const Eigen::Vector2d& x2,
                     const Eigen::Vector2d& y1, const Eigen::Vector2d& y2) {
  const Eigen::Vector2d dx = x2 - x1;
  const Eigen::Vector2d dy = y2 - y1;
  constexpr double kMinSeparation = 1e-9;
  if (dx.norm() < kMinSeparation || dy.norm() < kMinSeparation) {
    throw DegenerateSample("two-point sample has coincident points");
  }
  const double theta = std::atan2(dy.y(), dy.x()) - std::atan2(dx.y(), dx.x());
  const Pose rotation_only(theta, 0.0, 0.0);
  const Eigen::Vector2d t = 0.5 * (y1 + y2) - rotation_only.rotation() * (0.5 * (x1 + x2));
  return {theta, t};
}

Pose fit_rigid(std::span<const Eigen::Vector2d> source, std::span<const Eigen::Vector2d> target,
               std::span<const double> weights) {
  if (source.size() != target.size() || source.empty()) {
    throw InsufficientInliers("rigid fit needs matching, nonempty point lists");
  }
  const bool weighted = !weights.empty();
  double total = 0.0;
  Eigen::Vector2d mean_x = Eigen::Vector2d::Zero();
  Eigen::Vector2d mean_y = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    const double w = weighted ? weights[i] : 1.0;
    total += w;
    mean_x += w * source[i];
    mean_y += w * target[i];
  }
  if (!(total > 0.0)) throw InsufficientInliers("rigid fit has zero total weight");
  mean_x /= total;
  mean_y /= total;

  // Planar Umeyama: the optimal angle maximizes sum w (y' . R x').
  double dot = 0.0;
  double cross = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const double w = weighted ? weights[i] : 1.0;
    const Eigen::Vector2d a = source[i] - mean_x;
    const Eigen::Vector2d b = target[i] - mean_y;
    dot += w * a.dot(b);
    cross += w * (a.x() * b.y() - a.y() * b.x());
  }
  const double theta = std::atan2(cross, dot);
  const Pose rotation_only(theta, 0.0, 0.0);
  return {theta, mean_y - rotation_only.rotation() * mean_x};
}

RansacResult ransac_rigid(std::span<const Correspondence> candidates, const Submap& current,
                          const Submap& previous, const RansacConfig& config) {
  config.validate();
  if (candidates.size() < 2) {
    throw InsufficientInliers("ransac needs at least two candidate correspondences, got " +
                              std::to_string(candidates.size()));
  }
  for (const Correspondence& c : candidates) {
    if (c.index_x >= current.points.size() || c.index_y >= previous.points.size()) {
      throw InsufficientInliers("correspondence index out of range");
    }
  }

  const double thr_sq = config.inlier_threshold * config.inlier_threshold;
  auto consensus = [&](const Pose& t) {
    std::vector<std::size_t> in;
    const Eigen::Matrix2d r = t.rotation();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const Eigen::Vector2d d = planar(previous.points[candidates[c].index_y]) -
                                (r * planar(current.points[candidates[c].index_x]) +
                                 t.translation());
      if (d.squaredNorm() < thr_sq) in.push_back(c);
    }
    return in;
  };

  std::vector<std::size_t> best;
  const auto count = static_cast<std::uint64_t>(candidates.size());
  for (std::size_t it = 0; it < config.iterations; ++it) {
    std::mt19937_64 rng(derive_seed(config.seed, {it}));
    std::uniform_int_distribution<std::uint64_t> pick(0, count - 1);
    const std::uint64_t a = pick(rng);
    std::uint64_t b = pick(rng);
    while (b == a) b = pick(rng);

    const Correspondence& ca = candidates[a];
    const Correspondence& cb = candidates[b];
    Pose hypothesis;
    try {
      hypothesis = solve_two_point(planar(current.points[ca.index_x]),
                                   planar(current.points[cb.index_x]),
                                   planar(previous.points[ca.index_y]),
                                   planar(previous.points[cb.index_y]));
    } catch (const DegenerateSample&) {
      continue;
    }
    std::vector<std::size_t> in = consensus(hypothesis);
    if (in.size() > best.size()) best = std::move(in);
  }

  auto refit = [&](const std::vector<std::size_t>& set) {
    std::vector<Eigen::Vector2d> src;
    std::vector<Eigen::Vector2d> dst;
    src.reserve(set.size());
    dst.reserve(set.size());
    for (std::size_t c : set) {
      src.push_back(planar(current.points[candidates[c].index_x]));
      dst.push_back(planar(previous.points[candidates[c].index_y]));
    }
    return fit_rigid(src, dst);
  };

  if (best.size() < std::max<std::size_t>(config.min_inliers, 2)) {
    throw InsufficientInliers("best hypothesis has " + std::to_string(best.size()) +
                              " inliers, need " + std::to_string(config.min_inliers));
  }

  // Refit until the consensus set stops changing; the final set is always
  // re-evaluated under the returned transform.
  Pose transform = refit(best);
  for (int round = 0; round < 10; ++round) {
    std::vector<std::size_t> again = consensus(transform);
    if (again == best || again.size() < 2) {
      best = std::move(again);
      break;
    }
    best = std::move(again);
    transform = refit(best);
  }
  best = consensus(transform);
  if (best.size() < std::max<std::size_t>(config.min_inliers, 2)) {
    throw InsufficientInliers("refit consensus has " + std::to_string(best.size()) +
                              " inliers, need " + std::to_string(config.min_inliers));
  }

  RansacResult result;
  result.coarse_transform = transform;
  result.inliers.reserve(best.size());
  for (std::size_t c : best) result.inliers.push_back(candidates[c]);
  return result;
}

}  // namespace radloc
