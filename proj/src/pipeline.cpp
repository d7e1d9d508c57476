#include "radloc/pipeline.hpp"

#include <array>
#include <cmath>

#include "radloc/errors.hpp"

namespace radloc {

namespace {

constexpr std::array kMethods{Method::dcloc,         Method::dcloc_no_dc, Method::dcloc_no_ue,
                              Method::dcloc_neither, Method::icp,         Method::ndt,
                              Method::egomotion};

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::dcloc: return "dcloc";
    case Method::dcloc_no_dc: return "dcloc_no_dc";
    case Method::dcloc_no_ue: return "dcloc_no_ue";
    case Method::dcloc_neither: return "dcloc_neither";
    case Method::icp: return "icp";
    case Method::ndt: return "ndt";
    case Method::egomotion: return "egomotion";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : kMethods) {
    if (method_name(m) == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected dcloc, dcloc_no_dc, dcloc_no_ue, dcloc_neither, icp, ndt, "
                    "egomotion)");
}

std::span<const Method> all_methods() { return kMethods; }

MethodFlags method_flags(Method method) {
  switch (method) {
    case Method::dcloc: return {true, true};
    case Method::dcloc_no_dc: return {true, false};
    case Method::dcloc_no_ue: return {false, true};
    default: return {false, false};
  }
}

Method pipeline_arm(bool uncertainty, bool compensation) {
  if (uncertainty) return compensation ? Method::dcloc : Method::dcloc_no_dc;
  return compensation ? Method::dcloc_no_ue : Method::dcloc_neither;
}

Association associate(const Submap& current, const Submap& previous,
                      const PipelineConfig& config) {
  const std::vector<Correspondence> candidates =
      match_descriptors(current, previous, config.match);
  RansacResult ransac = ransac_rigid(candidates, current, previous, config.ransac);
  return {std::move(ransac.inliers), ransac.coarse_transform};
}

Submap prepare_submap(std::span<const PosedScan> scans, bool compensate,
                      const PipelineConfig& config, const Pose& anchor_pose) {
  SubmapOptions options;
  options.compensate = compensate;
  options.noise = config.model_noise;
  return describe(build_submap(scans, config.radar, options, anchor_pose), config.descriptor);
}

namespace {

// Body-frame points of one scan, compensated with `velocity` when given.
std::vector<Eigen::Vector2d> scan_points(const Scan& scan, const RadarParams& params,
                                         const Eigen::Vector2d* velocity) {
  const Scan source = velocity ? with_predicted_radial_velocity(scan, *velocity) : scan;
  std::vector<Eigen::Vector2d> out;
  out.reserve(source.detections.size());
  for (const RadarDetection& det : source.detections) {
    Eigen::Vector3d p;
    if (velocity) {
      try {
        p = polar_to_cartesian(compensate(det, params));
      } catch (const NegativeRange&) {
        continue;
      }
    } else {
      p = polar_to_cartesian(det);
    }
    out.emplace_back((scan.sensor_extrinsic * p).head<2>());
  }
  return out;
}

}  // namespace

std::vector<Eigen::Vector2d> infer_ego_velocities(std::span<const PosedScan> scans,
                                                  const PipelineConfig& config,
                                                  std::span<const Eigen::Vector2d> velocities) {
  std::vector<Eigen::Vector2d> out(scans.size(), Eigen::Vector2d::Zero());
  if (scans.size() < 2) return out;

  std::vector<std::vector<Eigen::Vector2d>> clouds;
  clouds.reserve(scans.size());
  for (std::size_t k = 0; k < scans.size(); ++k) {
    const Eigen::Vector2d* v = velocities.empty() ? nullptr : &velocities[k];
    clouds.push_back(scan_points(scans[k].scan, config.radar, v));
  }

  // Motion of scan k expressed in scan k-1; constant-velocity seed.
  std::vector<Pose> steps(scans.size());
  Pose seed;
  for (std::size_t k = 1; k < scans.size(); ++k) {
    if (clouds[k].empty() || clouds[k - 1].empty()) {
      steps[k] = seed;
      continue;
    }
    steps[k] = icp_align(clouds[k], clouds[k - 1], seed, config.egomotion.odometry).transform;
    seed = steps[k];
  }

  for (std::size_t k = 1; k < scans.size(); ++k) {
    const double dt = scans[k].scan.timestamp - scans[k - 1].scan.timestamp;
    if (!(dt > 0.0)) continue;
    // Translation is expressed in scan k-1; rotate it into scan k's frame.
    out[k] = steps[k].rotation().transpose() * steps[k].translation() / dt;
  }
  const double dt01 = scans[1].scan.timestamp - scans[0].scan.timestamp;
  if (dt01 > 0.0) out[0] = steps[1].translation() / dt01;
  return out;
}

Scan with_predicted_radial_velocity(const Scan& scan, const Eigen::Vector2d& body_velocity) {
  Scan out = scan;
  const Eigen::Vector2d sensor_velocity =
      scan.sensor_extrinsic.rotation().transpose() * body_velocity;
  for (RadarDetection& det : out.detections) {
    const Eigen::Vector2d los(std::cos(det.azimuth), std::sin(det.azimuth));
    det.radial_velocity = -sensor_velocity.dot(los);
  }
  return out;
}

namespace {

std::vector<PosedScan> predicted_scans(std::span<const PosedScan> scans,
                                       std::span<const Eigen::Vector2d> velocities) {
  std::vector<PosedScan> out(scans.begin(), scans.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].scan = with_predicted_radial_velocity(scans[k].scan, velocities[k]);
  }
  return out;
}

// Association + uncertainty-aware registration; keeps `fallback` when the
// association step fails.
RegistrationResult register_or_keep(const Submap& current, const Submap& previous,
                                    const Pose& fallback, const PipelineConfig& config) {
  try {
    const Association assoc = associate(current, previous, config);
    return register_weighted(current, previous, assoc.inliers, assoc.coarse_transform,
                             config.solver);
  } catch (const NoMatches&) {
  } catch (const InsufficientInliers&) {
  }
  RegistrationResult kept;
  kept.transform = fallback;
  return kept;
}

}  // namespace

RegistrationResult egomotion_compensated_register(const Submap& current, const Submap& previous,
                                                  const Pose& init,
                                                  const PipelineConfig& config) {
  if (current.sources.empty() || previous.sources.empty()) {
    throw EmptySubmap("ego-motion baseline needs the raw scans retained in both submaps");
  }
  const Submap raw_current = current.described() ? current
                                                  : prepare_submap(current.sources, false, config);
  const Submap raw_previous =
      previous.described() ? previous : prepare_submap(previous.sources, false, config);
  RegistrationResult result = register_or_keep(raw_current, raw_previous, init, config);

  std::vector<Eigen::Vector2d> v_current;
  std::vector<Eigen::Vector2d> v_previous;
  for (std::size_t pass = 0; pass < config.egomotion.passes; ++pass) {
    v_current = infer_ego_velocities(current.sources, config, v_current);
    v_previous = infer_ego_velocities(previous.sources, config, v_previous);
    const auto cur_scans = predicted_scans(current.sources, v_current);
    const auto prev_scans = predicted_scans(previous.sources, v_previous);
    Submap cur;
    Submap prev;
    try {
      cur = prepare_submap(cur_scans, true, config, current.anchor_pose);
      prev = prepare_submap(prev_scans, true, config, previous.anchor_pose);
    } catch (const EmptySubmap&) {
      break;
    }
    RegistrationResult next = register_or_keep(cur, prev, result.transform, config);
    next.iterations += result.iterations;
    result = std::move(next);
  }
  return result;
}

RegistrationResult localize(std::span<const PosedScan> current_scans,
                            std::span<const PosedScan> previous_scans, Method method,
                            const PipelineConfig& config) {
  const MethodFlags flags = method_flags(method);
  const Submap current = prepare_submap(current_scans, flags.compensation, config);
  const Submap previous = prepare_submap(previous_scans, flags.compensation, config);

  switch (method) {
    case Method::dcloc:
    case Method::dcloc_no_dc:
    case Method::dcloc_no_ue:
    case Method::dcloc_neither: {
      const Association assoc = associate(current, previous, config);
      return flags.uncertainty
                 ? register_weighted(current, previous, assoc.inliers, assoc.coarse_transform,
                                     config.solver)
                 : register_unweighted(current, previous, assoc.inliers,
                                       assoc.coarse_transform, config.solver);
    }
    case Method::icp:
    case Method::ndt: {
      Pose init;
      try {
        init = associate(current, previous, config).coarse_transform;
      } catch (const NoMatches&) {
      } catch (const InsufficientInliers&) {
      }
      return method == Method::icp ? icp_register(current, previous, init, config.icp)
                                   : ndt_register(current, previous, init, config.ndt);
    }
    case Method::egomotion:
      return egomotion_compensated_register(current, previous, Pose(), config);
  }
  throw ConfigError("unhandled method");
}

}  // namespace radloc
