#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gbplan/behavior_graph.hpp"
#include "gbplan/cost_model.hpp"
#include "gbplan/predictions.hpp"
#include "gbplan/search.hpp"
#include "gbplan/trajectory.hpp"

namespace gbplan {

enum class AgentBehavior { random_accel, idm_follow };

struct AgentSpec {
  std::string id;
  std::string lane;
  double s = 0.0;
  double v = 0.0;
  double length = 4.5;
  double width = 2.0;
  AgentBehavior behavior = AgentBehavior::random_accel;
  double accel_lo = -0.5;  // random_accel draw range, m/s^2
  double accel_hi = 0.5;
  IdmParams idm;  // idm_follow parameters (v_desired is the agent's own)
};

struct AgentState {
  double s = 0.0;
  double v = 0.0;
  double a = 0.0;
};

// Uniform draw in [lo, hi) from the top 53 bits of one generator output;
// bit-identical across platforms.
double uniform_draw(std::mt19937_64& rng, double lo, double hi);

// Multi-hypothesis forecast for every agent over the planning horizon:
// constant velocity (p=0.5) and gentle accel/decel at +-0.5 m/s^2 (p=0.25
// each), speeds floored at zero.
PredictionSet predict_agents(const std::vector<AgentSpec>& specs,
                             const std::vector<AgentState>& states,
                             int horizon_steps, double dt);

struct SimConfig {
  int steps = 30;  // planning cycles
  std::uint64_t seed = 1;
  double dt_fine = 0.05;
  BranchingMode mode = BranchingMode::proposed;
  HeuristicKind heuristic = HeuristicKind::full;
};

struct CycleRecord {
  int cycle = 0;
  SearchStatus status = SearchStatus::found;
  double plan_cost = 0.0;
  long expanded = 0;
  long generated = 0;
  bool fallback = false;   // planner found nothing; constant braking applied
  bool emergency = false;  // comfortable braking would not clear; hard brake
  VehicleState ego;        // ego state at the start of the cycle
};

struct SimResult {
  std::vector<CycleRecord> cycles;
  std::vector<TrajectoryPoint> driven;  // executed trajectory at dt_fine
  bool collision = false;
  int collision_cycle = -1;
  int fallback_count = 0;
  long total_expanded = 0;
  long total_generated = 0;
  VehicleState final_ego;
  std::vector<AgentState> final_agents;
};

// Closed loop: plan, execute the first step exactly, advance the agents, and
// repeat.  Agents keep to their lane; random_accel agents draw one accel per
// cycle in spec order from a generator seeded with sim.seed, idm_follow
// agents react to whatever is ahead of them (ego included) at the start of
// the cycle.  Stops early if the executed motion ever overlaps an agent
// footprint.
SimResult run_closed_loop(const RoadMap& road, const VehicleState& ego0,
                          const std::vector<AgentSpec>& agents,
                          const PlannerConfig& cfg, const CostWeights& weights,
                          const SimConfig& sim);

}  // namespace gbplan
