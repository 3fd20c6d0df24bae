#pragma once

#include <vector>

#include "gbplan/behavior_graph.hpp"

namespace gbplan {

// Weights for the stage cost terms plus the headway time constant used by the
// front-gap penalty.  All weights must be >= 0.
struct CostWeights {
  double w_front = 1.0;
  double w_cut_in = 2.0;
  double w_velocity = 1.0;
  double w_accel = 0.2;
  double w_accel_rate = 0.2;
  double w_lane_change = 0.5;
  double tau_front = 1.5;  // s, desired time headway in the front-gap penalty

  void validate() const;
};

enum class HeuristicKind { none, full };

// Per-step lower bounds on the stage-cost terms for the remaining steps
// k+1..T, computed under the stay-in-lane hypothesis.  Kept around so tests
// can check each term independently.
struct PerStepBound {
  double j_front = 0.0;
  double j_cut_in = 0.0;
  double j_velocity = 0.0;
  double j_accel = 0.0;
  double j_accel_rate = 0.0;
};

struct HeuristicBound {
  std::vector<PerStepBound> per_step;  // index 0 corresponds to step k+1
  // Weighted total.  The velocity terms hold on every branch; the summed
  // interaction terms hold only while the ego stays in its lane, so whenever
  // a lane change could escape them their contribution is capped at the
  // penalty one change would cost.
  double value = 0.0;
};

// Stage cost of the transition parent -> child under `action`.  The
// interaction terms (front gap, cut-in braking) are evaluated against the
// prediction hypotheses at the child's step.
CostBreakdown edge_cost(const VehicleState& parent, const VehicleState& child,
                        const Action& action, const WorldView& world,
                        const CostWeights& weights, const PlannerConfig& cfg);

// Admissible lower bound on the remaining cost-to-go from `state` under the
// given branching mode.  Built from reachable velocity/position envelopes;
// never exceeds the cost of any feasible completion.  Baseline mode has no
// lane-change edges, so its bound skips the escape cap and stays tighter.
HeuristicBound full_heuristic(const VehicleState& state, const WorldView& world,
                              const CostWeights& weights,
                              const PlannerConfig& cfg, BranchingMode mode);

// Dispatch helper: HeuristicKind::none always returns 0.
double heuristic_value(const VehicleState& state, const WorldView& world,
                       const CostWeights& weights, const PlannerConfig& cfg,
                       BranchingMode mode, HeuristicKind kind);

}  // namespace gbplan
