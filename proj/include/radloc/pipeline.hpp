#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radloc/association.hpp"
#include "radloc/radar.hpp"
#include "radloc/registration.hpp"
#include "radloc/submap.hpp"
#include "radloc/uncertainty.hpp"

namespace radloc {

enum class Method { dcloc, dcloc_no_dc, dcloc_no_ue, dcloc_neither, icp, ndt, egomotion };

std::string_view method_name(Method method);
/// Throws ConfigError on an unknown name.
Method parse_method(std::string_view name);
std::span<const Method> all_methods();

/// Which of the two switches (uncertainty weighting, Doppler compensation)
/// a method uses. Baselines use neither.
struct MethodFlags {
  bool uncertainty = false;
  bool compensation = false;
};
MethodFlags method_flags(Method method);
/// Inverse of method_flags over the four pipeline arms.
Method pipeline_arm(bool uncertainty, bool compensation);

struct EgomotionConfig {
  /// Velocity re-estimation / re-registration rounds after the first,
  /// uncompensated registration.
  std::size_t passes = 2;
  IcpConfig odometry;
};

struct PipelineConfig {
  RadarParams radar;
  PolarNoise model_noise;
  DescriptorConfig descriptor;
  MatchConfig match;
  RansacConfig ransac;
  SolverConfig solver;
  IcpConfig icp;
  NdtConfig ndt;
  EgomotionConfig egomotion;
};

struct Association {
  std::vector<Correspondence> inliers;
  Pose coarse_transform;
};

/// Descriptor matching followed by RANSAC; both submaps must be described.
/// Propagates NoMatches / InsufficientInliers.
Association associate(const Submap& current, const Submap& previous,
                      const PipelineConfig& config);

/// describe(build_submap(...)) with the pipeline's noise model.
Submap prepare_submap(std::span<const PosedScan> scans, bool compensate,
                      const PipelineConfig& config, const Pose& anchor_pose = {});

/// Per-scan body-frame ego velocity inferred from scan-to-scan ICP on the
/// scans' own (optionally compensated) points. `velocities`, when given,
/// holds the estimate used to compensate each scan before alignment.
std::vector<Eigen::Vector2d> infer_ego_velocities(
    std::span<const PosedScan> scans, const PipelineConfig& config,
    std::span<const Eigen::Vector2d> velocities = {});

/// Replaces every detection's radial velocity with the static-world
/// prediction -(v_sensor . line_of_sight).
Scan with_predicted_radial_velocity(const Scan& scan, const Eigen::Vector2d& body_velocity);

/// Ego-motion compensation baseline: register without compensation, infer
/// ego velocity from the scans' own motion estimates, compensate ranges with
/// predicted radial velocities, re-register; repeated `passes` times.
/// Both submaps must retain their raw sources.
RegistrationResult egomotion_compensated_register(const Submap& current, const Submap& previous,
                                                  const Pose& init,
                                                  const PipelineConfig& config);

/// Full localization of one pair with the given method. Association failures
/// propagate for the correspondence-based arms; ICP/NDT/egomotion fall back to
/// an identity initial guess.
RegistrationResult localize(std::span<const PosedScan> current_scans,
                            std::span<const PosedScan> previous_scans, Method method,
                            const PipelineConfig& config);

}  // namespace radloc
