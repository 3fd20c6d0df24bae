#pragma once

#include <optional>
#include <vector>

#include "gbplan/geometry.hpp"

namespace gbplan {

struct IdmParams {
  double v_desired = 13.0;
  double time_headway = 1.5;  // s
  double min_gap = 2.0;       // m
  double a_max = 2.0;         // m/s^2
  double b_comf = 1.5;        // m/s^2
  double delta = 4.0;
  double b_hard = 4.0;  // clamp floor for the returned acceleration
};

struct IdmLeader {
  double gap = 0.0;  // net (bumper-to-bumper) gap, m
  double v = 0.0;    // leader speed, m/s
};

/// Intelligent-driver-model acceleration for an ego at v_ego, optionally
/// following a leader.  Free road when no leader is given.  The result is
/// clamped to [-b_hard, a_max].  Throws InvalidInput for v_ego < 0 or a
/// non-positive gap.
double idm_acceleration(double v_ego, const std::optional<IdmLeader>& leader,
                        const IdmParams& p);

struct MobilParams {
  double politeness = 0.5;
  double a_threshold = 0.1;  // m/s^2 incentive threshold
  double b_safe = 4.0;       // m/s^2 safety decel bound for the new follower
};

/// One surrounding vehicle as seen from the ego: net gap to the ego and speed.
struct MobilVehicle {
  double gap = 0.0;
  double v = 0.0;
};

/// Leader/follower situation on one lane, relative to the ego.
struct MobilContext {
  std::optional<MobilVehicle> leader;
  std::optional<MobilVehicle> follower;
};

enum class LaneChangeDecision { stay, change };

/// MOBIL gate: change when the new follower can stay above -b_safe and the
/// politeness-weighted acceleration gain beats a_threshold.  Gaps between a
/// follower and the leader beyond the ego are bridged with ego_length.
/// Throws InvalidInput for negative gaps.
LaneChangeDecision mobil_decision(const MobilContext& current, const MobilContext& target,
                                  double v_ego, double ego_length, const IdmParams& idm,
                                  const MobilParams& p);

/// Pure-pursuit curvature command toward a target path: kappa = 2*y_l / L^2
/// with y_l the lateral offset of the lookahead point in the vehicle frame,
/// clamped to [-kappa_max, kappa_max].  Throws OutOfDomain when no point at
/// arc distance `lookahead` ahead of the pose projection exists.
double pure_pursuit_curvature(const CartesianPose& pose, const LanePath& target,
                              double lookahead, double kappa_max);

/// One constant-jerk phase.
struct JerkPhase {
  double duration = 0.0;
  double jerk = 0.0;
};

/// Time-optimal transfer between velocities under jerk and acceleration
/// bounds, ending at zero acceleration.
struct JerkProfile {
  std::vector<JerkPhase> phases;
  double total_time = 0.0;
  double distance = 0.0;
  double v_end = 0.0;
  double a_end = 0.0;
};

/// Minimum-time bang-bang jerk profile (with an optional constant-acceleration
/// hold) from (v0, a0) to v_target with zero final acceleration, under
/// |jerk| <= j_max and |a| <= a_lim.  Throws InvalidInput for non-positive
/// bounds, |a0| > a_lim, or a target below zero speed.
JerkProfile time_optimal_velocity_profile(double v0, double a0, double v_target,
                                          double j_max, double a_lim);

/// Evaluates (s, v, a) advanced by `t` seconds from (0, v0, a0) through the
/// profile's phases; past the last phase the state coasts at v_end.
struct ProfileState {
  double s = 0.0;
  double v = 0.0;
  double a = 0.0;
};
ProfileState profile_state_at(const JerkProfile& profile, double v0, double a0, double t);

}  // namespace gbplan
