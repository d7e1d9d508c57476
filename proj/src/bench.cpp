#include "radloc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iterator>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "radloc/errors.hpp"
#include "radloc/random.hpp"

namespace radloc {

PoseError evaluate_pair(const RegistrationResult& result, const Pose& ground_truth) {
  return {(result.transform.translation() - ground_truth.translation()).norm(),
          std::abs(wrap_angle(result.transform.theta() - ground_truth.theta()))};
}

const MethodSummary& Summary::at(Method method) const {
  for (const MethodSummary& m : methods) {
    if (m.method == method) return m;
  }
  throw ConfigError("summary has no method '" + std::string(method_name(method)) + "'");
}

namespace {

MetricStats stats(std::vector<double> values) {
  MetricStats s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.max = values.back();
  const std::size_t n = values.size();
  s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return s;
}

std::vector<Method> methods_in_order(std::span<const PairResult> results) {
  std::vector<Method> out;
  for (const PairResult& r : results) {
    if (std::find(out.begin(), out.end(), r.method) == out.end()) out.push_back(r.method);
  }
  return out;
}

}  // namespace

Summary aggregate(std::span<const PairResult> results, double inlier_threshold) {
  if (results.empty()) throw AllOutliers("no results to aggregate");
  Summary summary;
  const std::vector<Method> methods = methods_in_order(results);

  bool first = true;
  for (Method m : methods) {
    std::set<std::size_t> inliers;
    for (const PairResult& r : results) {
      if (r.method == m && r.translation_error < inlier_threshold) inliers.insert(r.pair_id);
    }
    if (first) {
      summary.joint_inliers = std::move(inliers);
      first = false;
    } else {
      std::set<std::size_t> both;
      std::set_intersection(summary.joint_inliers.begin(), summary.joint_inliers.end(),
                            inliers.begin(), inliers.end(), std::inserter(both, both.begin()));
      summary.joint_inliers = std::move(both);
    }
  }
  if (summary.joint_inliers.empty()) {
    throw AllOutliers("no pair is an inlier for every method at threshold " +
                      std::to_string(inlier_threshold) + " m");
  }

  for (Method m : methods) {
    std::vector<double> trans;
    std::vector<double> rot;
    for (const PairResult& r : results) {
      if (r.method == m && summary.joint_inliers.count(r.pair_id) != 0) {
        trans.push_back(r.translation_error);
        rot.push_back(r.rotation_error);
      }
    }
    summary.methods.push_back({m, stats(std::move(trans)), stats(std::move(rot))});
  }
  return summary;
}

std::vector<VelocityBin> bin_by_velocity_diff(std::span<const PairResult> results,
                                              double bin_width) {
  if (!(bin_width > 0.0)) throw ConfigError("bin width must be positive");
  std::vector<VelocityBin> out;
  if (results.empty()) return out;
  double max_dv = 0.0;
  for (const PairResult& r : results) max_dv = std::max(max_dv, r.velocity_diff);
  const auto bin_count = static_cast<std::size_t>(std::floor(max_dv / bin_width)) + 1;

  for (Method m : methods_in_order(results)) {
    std::vector<double> trans(bin_count, 0.0);
    std::vector<double> rot(bin_count, 0.0);
    std::vector<std::size_t> count(bin_count, 0);
    for (const PairResult& r : results) {
      if (r.method != m) continue;
      const auto b = std::min(static_cast<std::size_t>(std::floor(r.velocity_diff / bin_width)),
                              bin_count - 1);
      trans[b] += r.translation_error;
      rot[b] += r.rotation_error;
      ++count[b];
    }
    for (std::size_t b = 0; b < bin_count; ++b) {
      VelocityBin bin;
      bin.method = m;
      bin.lower = static_cast<double>(b) * bin_width;
      bin.upper = static_cast<double>(b + 1) * bin_width;
      bin.count = count[b];
      if (count[b] > 0) {
        bin.mean_translation = trans[b] / static_cast<double>(count[b]);
        bin.mean_rotation = rot[b] / static_cast<double>(count[b]);
      }
      out.push_back(bin);
    }
  }
  return out;
}

void BenchConfig::validate() const {
  if (methods.empty()) throw ConfigError("bench needs at least one method");
  if (!(inlier_threshold > 0.0)) throw ConfigError("inlier_threshold must be positive");
  if (!(bin_width > 0.0)) throw ConfigError("bin_width must be positive");
  pipeline.solver.validate();
  pipeline.ransac.validate();
  pipeline.descriptor.validate();
  pipeline.model_noise.validate();
}

namespace {

PairResult run_one(const Dataset& dataset, const LoopPair& pair, Method method,
                   const BenchConfig& config) {
  PairResult row;
  row.pair_id = pair.id;
  row.method = method;
  row.velocity_diff = pair.velocity_diff;

  PipelineConfig pipeline = config.pipeline;
  pipeline.ransac.seed = derive_seed(config.seed, {pair.id});

  const auto start = std::chrono::steady_clock::now();
  try {
    const auto current = dataset.posed_scans(pair.current);
    const auto previous = dataset.posed_scans(pair.previous);
    const RegistrationResult result = localize(current, previous, method, pipeline);
    const PoseError err = evaluate_pair(result, pair.ground_truth);
    row.translation_error = err.translation;
    row.rotation_error = err.rotation;
    row.converged = result.converged;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error&) {
    row.translation_error = std::numeric_limits<double>::infinity();
    row.rotation_error = std::numbers::pi;
    row.converged = false;
  }
  if (config.record_runtime) {
    row.runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

}  // namespace

BenchReport run_benchmark(const Dataset& dataset, std::span<const Method> methods,
                          const BenchConfig& config) {
  config.validate();
  if (methods.empty()) throw ConfigError("bench needs at least one method");
  const auto& pairs = dataset.manifest.pairs;
  if (pairs.empty()) throw ConfigError("dataset manifest lists no loop pairs");

  const std::size_t tasks = pairs.size() * methods.size();
  std::vector<PairResult> rows(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t task = next++; task < tasks; task = next++) {
      try {
        rows[task] = run_one(dataset, pairs[task / methods.size()], methods[task % methods.size()],
                             config);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t jobs =
      std::clamp<std::size_t>(config.jobs == 0 ? std::thread::hardware_concurrency() : config.jobs,
                              1, tasks);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < jobs; ++i) threads.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  auto method_rank = [&](Method m) {
    return static_cast<std::size_t>(std::find(methods.begin(), methods.end(), m) - methods.begin());
  };
  std::sort(rows.begin(), rows.end(), [&](const PairResult& a, const PairResult& b) {
    if (a.pair_id != b.pair_id) return a.pair_id < b.pair_id;
    return method_rank(a.method) < method_rank(b.method);
  });

  BenchReport report;
  report.results = rows;
  try {
    report.summary = aggregate(rows, config.inlier_threshold);
    std::vector<PairResult> inliers;
    for (const PairResult& r : rows) {
      if (report.summary->joint_inliers.count(r.pair_id) != 0) inliers.push_back(r);
    }
    report.bins = bin_by_velocity_diff(inliers, config.bin_width);
  } catch (const AllOutliers&) {
    report.summary.reset();
  }
  return report;
}

AblationReport run_ablation(const Dataset& dataset, const BenchConfig& config) {
  const std::vector<Method> arms{pipeline_arm(false, false), pipeline_arm(false, true),
                                 pipeline_arm(true, false), pipeline_arm(true, true)};
  AblationReport report;
  report.bench = run_benchmark(dataset, arms, config);
  if (!report.bench.summary) {
    throw AllOutliers("no pair is an inlier for all four ablation arms");
  }
  for (Method m : arms) {
    const MethodFlags flags = method_flags(m);
    report.rows.push_back({m, flags.uncertainty, flags.compensation, report.bench.summary->at(m)});
  }
  return report;
}

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string pairs_csv(std::span<const PairResult> results) {
  std::string out = std::string(kPairsCsvHeader) + "\n";
  for (const PairResult& r : results) {
    out += std::to_string(r.pair_id) + "," + std::string(method_name(r.method)) + "," +
           fmt(r.velocity_diff) + "," + fmt(r.translation_error) + "," + fmt(r.rotation_error) +
           "," + (r.converged ? "true" : "false") + "," + fmt(r.runtime) + "\n";
  }
  return out;
}

std::string summary_csv(const Summary& summary) {
  std::string out = std::string(kSummaryCsvHeader) + "\n";
  const std::string inliers = std::to_string(summary.joint_inliers.size());
  for (const MethodSummary& m : summary.methods) {
    const std::string name(method_name(m.method));
    out += name + ",trans_err_m," + fmt(m.translation.mean) + "," + fmt(m.translation.max) + "," +
           fmt(m.translation.median) + "," + inliers + "\n";
    out += name + ",rot_err_rad," + fmt(m.rotation.mean) + "," + fmt(m.rotation.max) + "," +
           fmt(m.rotation.median) + "," + inliers + "\n";
  }
  return out;
}

std::string bins_csv(std::span<const VelocityBin> bins) {
  std::string out = std::string(kBinsCsvHeader) + "\n";
  for (const VelocityBin& b : bins) {
    out += std::string(method_name(b.method)) + "," + fmt(b.lower) + "," + fmt(b.upper) + "," +
           std::to_string(b.count) + "," +
           (b.mean_translation ? fmt(*b.mean_translation) : std::string()) + "," +
           (b.mean_rotation ? fmt(*b.mean_rotation) : std::string()) + "\n";
  }
  return out;
}

std::string ablation_csv(const AblationReport& report) {
  std::string out = std::string(kAblationCsvHeader) + "\n";
  const std::string inliers = std::to_string(report.bench.summary->joint_inliers.size());
  for (const AblationRow& r : report.rows) {
    const MetricStats& t = r.stats.translation;
    const MetricStats& q = r.stats.rotation;
    out += std::string(method_name(r.method)) + "," + (r.uncertainty ? "1" : "0") + "," +
           (r.compensation ? "1" : "0") + "," + fmt(t.mean) + "," + fmt(t.max) + "," +
           fmt(t.median) + "," + fmt(q.mean) + "," + fmt(q.max) + "," + fmt(q.median) + "," +
           inliers + "\n";
  }
  return out;
}

}  // namespace radloc
