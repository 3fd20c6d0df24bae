// Times the scenario battery once on a single thread and once with the
// parallel cell scheduler, then verifies the two runs produced the same
// metrics row for row (wall-clock excluded).  Usage:
//
//   bench_battery [scenario_count] [jobs]
//
// defaults to 12 scenarios and one job per hardware thread.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "gbplan/battery.hpp"
#include "gbplan/scenario.hpp"

using namespace gbplan;

namespace {

double run_timed(const std::vector<Scenario>& scenarios,
                 const std::vector<BranchingMode>& modes,
                 const std::vector<HeuristicKind>& heuristics, int jobs,
                 BatteryResult& out) {
  auto t0 = std::chrono::steady_clock::now();
  out = run_battery(scenarios, modes, heuristics, jobs);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

bool rows_match_ignoring_wall(const BatteryResult& a, const BatteryResult& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const MetricsRow& x = a.rows[i];
    const MetricsRow& y = b.rows[i];
    if (x.scenario_id != y.scenario_id || x.mode != y.mode ||
        x.heuristic != y.heuristic || x.seed != y.seed ||
        x.cycles != y.cycles || x.collision != y.collision ||
        x.fallbacks != y.fallbacks || x.expanded_total != y.expanded_total ||
        x.expanded_max != y.expanded_max ||
        x.generated_total != y.generated_total ||
        x.plan_cost_sum != y.plan_cost_sum ||
        x.mean_accel_sq != y.mean_accel_sq ||
        x.mean_jerk_sq != y.mean_jerk_sq ||
        x.cycle_costs != y.cycle_costs) {
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  int count = argc > 1 ? std::atoi(argv[1]) : 12;
  int jobs = argc > 2 ? std::atoi(argv[2])
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (count < 1 || jobs < 1) {
    std::fprintf(stderr, "usage: bench_battery [scenario_count>=1] [jobs>=1]\n");
    return 2;
  }

  const std::vector<ScenarioTemplate> templates{
      ScenarioTemplate::two_lane_road, ScenarioTemplate::lane_change,
      ScenarioTemplate::on_ramp, ScenarioTemplate::left_turn};
  std::vector<Scenario> scenarios = generate_batch(templates, count, 5000);
  const std::vector<BranchingMode> modes{BranchingMode::proposed,
                                         BranchingMode::baseline};
  const std::vector<HeuristicKind> heuristics{HeuristicKind::full};

  std::printf("battery: %zu scenarios x %zu modes x %zu heuristics = %zu cells\n",
              scenarios.size(), modes.size(), heuristics.size(),
              scenarios.size() * modes.size() * heuristics.size());

  BatteryResult serial, parallel;
  double t_serial = run_timed(scenarios, modes, heuristics, 1, serial);
  double t_parallel = run_timed(scenarios, modes, heuristics, jobs, parallel);

  std::printf("serial   (jobs=1):  %7.2f s\n", t_serial);
  std::printf("parallel (jobs=%d): %7.2f s   speedup %.2fx\n",
              parallel.jobs_used, t_parallel,
              t_parallel > 0.0 ? t_serial / t_parallel : 0.0);

  bool same = rows_match_ignoring_wall(serial, parallel);
  std::printf("metrics identical across schedulers: %s\n", same ? "yes" : "NO");
  return same ? 0 : 1;
}
