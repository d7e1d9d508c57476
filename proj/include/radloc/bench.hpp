#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "radloc/io.hpp"
#include "radloc/pipeline.hpp"

namespace radloc {

struct PairResult {
  std::size_t pair_id = 0;
  Method method = Method::dcloc;
  double translation_error = 0.0;  // m; +inf when the pipeline failed
  double rotation_error = 0.0;     // rad, [0, pi]
  double velocity_diff = 0.0;      // m/s
  bool converged = false;
  double runtime = 0.0;  // s
};

struct PoseError {
  double translation = 0.0;
  double rotation = 0.0;
};

/// ||t_est - t_gt|| and |wrap(theta_est - theta_gt)|.
PoseError evaluate_pair(const RegistrationResult& result, const Pose& ground_truth);

struct MetricStats {
  double mean = 0.0;
  double max = 0.0;
  double median = 0.0;
};

struct MethodSummary {
  Method method = Method::dcloc;
  MetricStats translation;
  MetricStats rotation;
};

struct Summary {
  /// Pairs that are inliers (translation error below threshold) for every
  /// method present.
  std::set<std::size_t> joint_inliers;
  std::vector<MethodSummary> methods;  // in first-appearance order

  const MethodSummary& at(Method method) const;
};

/// Drops pairs at or above the threshold, intersects the per-method inlier
/// sets and computes mean/max/median over the joint set.
/// Throws AllOutliers when the joint set is empty.
Summary aggregate(std::span<const PairResult> results, double inlier_threshold);

struct VelocityBin {
  Method method = Method::dcloc;
  double lower = 0.0;  // m/s, inclusive
  double upper = 0.0;  // exclusive
  std::size_t count = 0;
  /// Empty when the bin holds no result.
  std::optional<double> mean_translation;
  std::optional<double> mean_rotation;
};

/// Per-method bins [0, w), [w, 2w), ... up to the largest velocity difference.
std::vector<VelocityBin> bin_by_velocity_diff(std::span<const PairResult> results,
                                              double bin_width);

struct BenchConfig {
  std::vector<Method> methods{Method::dcloc, Method::icp, Method::ndt, Method::egomotion};
  double inlier_threshold = 2.0;  // m
  double bin_width = 1.0;         // m/s
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  /// Wall-clock runtimes make the per-pair CSV nondeterministic; off by
  /// default, the column then reads 0.
  bool record_runtime = false;
  PipelineConfig pipeline;

  void validate() const;
};

struct BenchReport {
  std::vector<PairResult> results;  // sorted by (pair id, method)
  std::optional<Summary> summary;   // empty when every pair is an outlier somewhere
  std::vector<VelocityBin> bins;    // over the joint inliers
};

BenchReport run_benchmark(const Dataset& dataset, std::span<const Method> methods,
                          const BenchConfig& config);

struct AblationRow {
  Method method = Method::dcloc;
  bool uncertainty = false;
  bool compensation = false;
  MethodSummary stats;
};

struct AblationReport {
  BenchReport bench;
  std::vector<AblationRow> rows;  // neither, D.C. only, U.E. only, both
};

AblationReport run_ablation(const Dataset& dataset, const BenchConfig& config);

/// pair_id,method,dv_mps,trans_err_m,rot_err_rad,converged,runtime_s
std::string pairs_csv(std::span<const PairResult> results);
/// method,metric,mean,max,median,inliers
std::string summary_csv(const Summary& summary);
std::string bins_csv(std::span<const VelocityBin> bins);
std::string ablation_csv(const AblationReport& report);

inline constexpr const char* kPairsCsvHeader =
    "pair_id,method,dv_mps,trans_err_m,rot_err_rad,converged,runtime_s";
inline constexpr const char* kSummaryCsvHeader = "method,metric,mean,max,median,inliers";
inline constexpr const char* kBinsCsvHeader =
    "method,bin_lo_mps,bin_hi_mps,count,mean_trans_err_m,mean_rot_err_rad";
inline constexpr const char* kAblationCsvHeader =
    "method,ue,dc,trans_mean_m,trans_max_m,trans_median_m,rot_mean_rad,rot_max_rad,"
    "rot_median_rad,inliers";

}  // namespace radloc
