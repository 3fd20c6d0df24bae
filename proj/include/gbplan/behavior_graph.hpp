#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gbplan/driver_models.hpp"
#include "gbplan/geometry.hpp"
#include "gbplan/predictions.hpp"

namespace gbplan {

enum class LateralAction { keep, left, right };

/// Action-set regimes: `proposed` gates lane changes with MOBIL and drops
/// fixed accelerations near the car-following model's output, `passive`
/// expands the same universe gated only by gap existence, `baseline` expands
/// fixed accelerations alone.
enum class BranchingMode { proposed, passive, baseline };

struct VehicleState {
  std::string lane;
  double s = 0.0;
  double d = 0.0;
  double theta = 0.0;  // global heading
  double kappa = 0.0;
  double v = 0.0;
  double a = 0.0;
  int k = 0;  // time-layer index
};

struct Action {
  enum class Lon { accel_target, velocity_target };
  Lon lon = Lon::accel_target;
  double value = 0.0;  // target acceleration [m/s^2] or target velocity [m/s]
  LateralAction lat = LateralAction::keep;
};

struct PlannerConfig {
  double dt = 1.0;
  int horizon_steps = 10;
  std::vector<double> accel_set = {-2.0, -1.0, 0.0, 1.0, 2.0};
  double idm_gate_margin = 0.5;  // fixed targets this close to the IDM output are dropped
  double max_accel_step = 1.9;   // |a_{k+1} - a_k| bound
  double v_desired = 13.0;
  long max_expansions = 2000000;  // search gives up past this many pops

  double kappa_max = 0.2;       // 1/m
  double kappa_dot_max = 0.15;  // 1/(m s)
  double a_abs_max = 6.0;       // bound on sqrt(a_lon^2 + (v^2 kappa)^2)

  double profile_jerk_max = 2.0;  // m/s^3, velocity-target transfers
  double profile_accel_max = 2.0;

  double lane_change_substep = 0.1;  // s
  double pursuit_min_lookahead = 5.0;
  double pursuit_time_gap = 1.0;  // lookahead = max(min_lookahead, time_gap * v)

  double safety_margin = 0.25;  // footprint inflation for planning-time collision checks
  double align_d_tol = 0.2;     // state counts as lane-aligned below these
  double align_theta_tol = 0.05;

  double ego_length = 4.5;
  double ego_width = 2.0;
  double corridor_half_width = 10.0;
  double following_range_factor = 3.0;  // car-following when gap <= s0 + v*T*factor

  IdmParams idm;      // idm.v_desired is overridden by v_desired for ego queries
  MobilParams mobil;

  /// Throws InvalidInput on inconsistent values.
  void validate() const;

  IdmParams ego_idm() const {
    IdmParams p = idm;
    p.v_desired = v_desired;
    return p;
  }
};

struct WorldView {
  const RoadMap* road = nullptr;
  const PredictionSet* predictions = nullptr;
};

/// Sub-step sample used for kinematic and collision checks; `t` is relative
/// to the start of the expanded step, `a` is the longitudinal acceleration.
struct TrajectorySample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double kappa = 0.0;
  double v = 0.0;
  double a = 0.0;
};

struct Expansion {
  VehicleState state;
  std::vector<TrajectorySample> samples;
};

enum class FeasibilityViolation {
  none,
  curvature,
  curvature_rate,
  accel_limit,
  negative_speed,
  collision,
};

struct CostBreakdown {
  double j_front = 0.0;
  double j_cut_in = 0.0;
  double j_velocity = 0.0;
  double j_accel = 0.0;
  double j_accel_rate = 0.0;
  double j_lane_change = 0.0;
  double total = 0.0;  // weighted sum of the terms above
};

struct BehaviorNode {
  VehicleState state;
  std::optional<Action> action_in;
  double g = 0.0;
  double h = 0.0;
  CostBreakdown edge;  // breakdown of the incoming edge
};

/// Heading error of `state` relative to its lane tangent.
double theta_rel(const VehicleState& state, const LanePath& lane);

/// True when the state sits on its lane centerline within the alignment
/// tolerances (velocity targets and new lane changes require this).
bool lane_aligned(const VehicleState& state, const LanePath& lane, const PlannerConfig& cfg);

/// Candidate actions for one expansion step under the given branching mode.
/// Deterministic order: keep-lane longitudinal actions (accelerations
/// ascending, then velocity targets), then left, then right lane changes.
std::vector<Action> select_actions(const VehicleState& state, const WorldView& world,
                                   const PlannerConfig& cfg, BranchingMode mode);

/// Constant-jerk longitudinal transition over one step; lateral components are
/// carried along the lane.  A step that would cross v = 0 decelerates to a
/// stop, holds, and ends with a = 0.  Returns nullopt when the acceleration
/// step bound is violated.
std::optional<Expansion> expand_accel_target(const VehicleState& state, double a_target,
                                             const LanePath& lane, const PlannerConfig& cfg);

/// Transfers to v_target along a minimum-time jerk profile and coasts for the
/// rest of the step.  Returns nullopt when the transfer does not fit into one
/// step or violates the acceleration step bound.
std::optional<Expansion> expand_velocity_target(const VehicleState& state, double v_target,
                                                const LanePath& lane, const PlannerConfig& cfg);

/// Forward-simulates one step of pure-pursuit steering toward `target` (which
/// may equal the current lane to continue an unfinished change), combined
/// with a constant-jerk acceleration transition.  The end state is
/// re-projected into the target lane.  Returns nullopt when the pursuit
/// geometry leaves the lane domain.
std::optional<Expansion> expand_lane_change(const VehicleState& state, const LanePath& current,
                                            const LanePath& target, double a_target,
                                            const PlannerConfig& cfg);

/// Kinematic-and-collision screen over a sampled sub-trajectory.  `step_base`
/// is the absolute step index at samples[0] so agent predictions can be
/// interpolated in step time.  Planning footprints are inflated by
/// cfg.safety_margin on each side.  Agents on `plan_lane` or a lane reachable
/// from it by neighbor hops are screened against their most likely forecast;
/// agents on any other lane cross the plan's path rather than share it, so
/// every forecast hypothesis must stay clear.  An empty `plan_lane` keeps the
/// most-likely screen for everyone.
FeasibilityViolation check_feasibility(const std::vector<TrajectorySample>& samples,
                                       const WorldView& world, const PlannerConfig& cfg,
                                       double step_base,
                                       const std::string& plan_lane = {});

/// Expansion entry point used by the search: dispatches on the action kind,
/// then screens the sampled sub-trajectory.  nullopt = invalid action.
std::optional<Expansion> expand_action(const VehicleState& state, const Action& action,
                                       const WorldView& world, const PlannerConfig& cfg);

/// Nearest agent ahead of / behind `s` on `lane` by most-likely predicted
/// position at step k.  Gap conventions are net (bumper-to-bumper) and are
/// computed by callers from the returned position and the footprints.
struct NeighborAgent {
  const AgentPrediction* agent = nullptr;
  double s = 0.0;
  double v = 0.0;
};
std::optional<NeighborAgent> front_agent(const PredictionSet& predictions,
                                         const std::string& lane, double s, int k);
std::optional<NeighborAgent> rear_agent(const PredictionSet& predictions,
                                        const std::string& lane, double s, int k);

/// Centerline pose with linear extrapolation past the lane ends (used to
/// place predicted agents that roll off the modeled stretch).
CartesianPose lane_pose_extrapolated(const LanePath& lane, double s);

/// Pose at lateral offset d and heading error theta_rel, extrapolating past
/// the lane ends.  Curvature maps through the offset transform inside the
/// domain and is zero on the extrapolated extensions.
CartesianPose offset_pose_extrapolated(const LanePath& lane, double s, double d,
                                       double theta_rel_in);

}  // namespace gbplan
