#pragma once

#include <string>
#include <vector>

#include "gbplan/scenario.hpp"

namespace gbplan {

std::string mode_name(BranchingMode m);
BranchingMode mode_from_name(const std::string& name);
std::string heuristic_name(HeuristicKind h);
HeuristicKind heuristic_from_name(const std::string& name);

// One closed-loop run of one scenario under one mode/heuristic pairing.
struct MetricsRow {
  std::string scenario_id;
  BranchingMode mode = BranchingMode::proposed;
  HeuristicKind heuristic = HeuristicKind::full;
  std::uint64_t seed = 0;
  int cycles = 0;
  bool collision = false;
  int fallbacks = 0;
  long expanded_total = 0;
  long expanded_max = 0;  // worst single cycle
  long generated_total = 0;
  double plan_cost_sum = 0.0;  // sum of per-cycle optimal costs
  std::vector<double> cycle_costs;
  double mean_accel_sq = 0.0;
  double mean_jerk_sq = 0.0;
  double wall_ms = 0.0;  // excluded from determinism comparisons
};

struct BatteryResult {
  std::vector<MetricsRow> rows;  // scenario-major, then mode, then heuristic
  int jobs_used = 1;
};

// Run every scenario under every (mode, heuristic) combination.  jobs > 1
// distributes the independent cells across threads; each cell writes only its
// own row, so the row content is identical to a serial run.
BatteryResult run_battery(const std::vector<Scenario>& scenarios,
                          const std::vector<BranchingMode>& modes,
                          const std::vector<HeuristicKind>& heuristics,
                          int jobs);

// scenario,mode,heuristic,seed,... header plus one line per row.
void write_metrics_csv(const BatteryResult& battery, std::ostream& os);

// Consistency checks over a finished battery: both heuristics must report
// the same per-cycle plan costs for every scenario/mode pairing, and no run
// may end in a collision.  Returns human-readable failure lines.
std::vector<std::string> battery_cross_checks(const BatteryResult& battery);

}  // namespace gbplan
