#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gbplan/behavior_graph.hpp"
#include "gbplan/cost_model.hpp"
#include "gbplan/traffic_sim.hpp"

namespace gbplan {

// A self-contained simulation setup: road, ego start, agents, and the
// planner/cost configuration to run it with.
struct Scenario {
  std::string id;
  std::uint64_t seed = 1;
  int steps = 30;  // closed-loop planning cycles
  RoadMap road;
  VehicleState ego;
  std::vector<AgentSpec> agents;
  PlannerConfig planner;
  CostWeights weights;
};

// Parse from the scenario JSON schema (see README).  Throws InvalidInput on
// missing required fields or inconsistent values.
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

// Serialize back to the same schema.
std::string scenario_to_json(const Scenario& sc);
void save_scenario(const Scenario& sc, const std::string& path);

// One JSON object per line: a header, one line per planning cycle, and a
// summary with collision/comfort/search totals.
void write_sim_log(std::ostream& os, const Scenario& sc, const SimConfig& sim,
                   const SimResult& result);

struct ComfortMetrics {
  double mean_accel_sq = 0.0;  // time-average of a(t)^2 over the driven path
  double mean_jerk_sq = 0.0;   // time-average of jerk(t)^2
};

// Exact time averages treating accel as piecewise linear between samples and
// jerk as trapezoidal.
ComfortMetrics comfort_metrics(const std::vector<TrajectoryPoint>& driven);

// Procedural scenario families covering car following, forced merges, free
// multi-lane driving, and a crossing turn.
enum class ScenarioTemplate {
  two_lane_road,
  lane_change,
  on_ramp,
  left_turn,
};

ScenarioTemplate template_from_name(const std::string& name);
std::string template_name(ScenarioTemplate t);

// Deterministic: the same (template, seed) always yields the same scenario.
Scenario generate_scenario(ScenarioTemplate t, std::uint64_t seed);

// Round-robin over the requested templates, seeds base_seed..base_seed+n-1.
std::vector<Scenario> generate_batch(const std::vector<ScenarioTemplate>& ts,
                                     int count, std::uint64_t base_seed);

}  // namespace gbplan
