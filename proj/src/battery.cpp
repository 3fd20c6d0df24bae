#include "gbplan/battery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gbplan/errors.hpp"

namespace gbplan {

std::string mode_name(BranchingMode m) {
  switch (m) {
    case BranchingMode::proposed: return "proposed";
    case BranchingMode::passive: return "passive";
    default: return "baseline";
  }
}

BranchingMode mode_from_name(const std::string& name) {
  if (name == "proposed") return BranchingMode::proposed;
  if (name == "passive") return BranchingMode::passive;
  if (name == "baseline") return BranchingMode::baseline;
  throw InvalidInput("unknown branching mode '" + name + "'");
}

std::string heuristic_name(HeuristicKind h) {
  return h == HeuristicKind::none ? "h0" : "hall";
}

HeuristicKind heuristic_from_name(const std::string& name) {
  if (name == "h0") return HeuristicKind::none;
  if (name == "hall") return HeuristicKind::full;
  throw InvalidInput("unknown heuristic '" + name + "' (use h0 or hall)");
}

namespace {

MetricsRow run_cell(const Scenario& sc, BranchingMode mode,
                    HeuristicKind heuristic) {
  MetricsRow row;
  row.scenario_id = sc.id;
  row.mode = mode;
  row.heuristic = heuristic;
  row.seed = sc.seed;

  SimConfig sim;
  sim.steps = sc.steps;
  sim.seed = sc.seed;
  sim.mode = mode;
  sim.heuristic = heuristic;

  auto t0 = std::chrono::steady_clock::now();
  SimResult r = run_closed_loop(sc.road, sc.ego, sc.agents, sc.planner,
                                sc.weights, sim);
  auto t1 = std::chrono::steady_clock::now();
  row.wall_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();

  row.cycles = static_cast<int>(r.cycles.size());
  row.collision = r.collision;
  row.fallbacks = r.fallback_count;
  row.expanded_total = r.total_expanded;
  row.generated_total = r.total_generated;
  for (const CycleRecord& c : r.cycles) {
    row.expanded_max = std::max(row.expanded_max, c.expanded);
    row.cycle_costs.push_back(c.plan_cost);
    row.plan_cost_sum += c.plan_cost;
  }
  ComfortMetrics cm = comfort_metrics(r.driven);
  row.mean_accel_sq = cm.mean_accel_sq;
  row.mean_jerk_sq = cm.mean_jerk_sq;
  return row;
}

}  // namespace

BatteryResult run_battery(const std::vector<Scenario>& scenarios,
                          const std::vector<BranchingMode>& modes,
                          const std::vector<HeuristicKind>& heuristics,
                          int jobs) {
  if (scenarios.empty() || modes.empty() || heuristics.empty())
    throw InvalidInput("run_battery: nothing to run");
  if (jobs < 1) jobs = 1;

  const long n_modes = static_cast<long>(modes.size());
  const long n_heur = static_cast<long>(heuristics.size());
  const long total = static_cast<long>(scenarios.size()) * n_modes * n_heur;

  BatteryResult out;
  out.rows.resize(static_cast<std::size_t>(total));
  out.jobs_used = 1;

  auto cell = [&](long idx) {
    long si = idx / (n_modes * n_heur);
    long mi = (idx / n_heur) % n_modes;
    long hi = idx % n_heur;
    out.rows[static_cast<std::size_t>(idx)] =
        run_cell(scenarios[static_cast<std::size_t>(si)],
                 modes[static_cast<std::size_t>(mi)],
                 heuristics[static_cast<std::size_t>(hi)]);
  };

#ifdef _OPENMP
  if (jobs > 1) {
    out.jobs_used = jobs;
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (long idx = 0; idx < total; ++idx) cell(idx);
    return out;
  }
#endif
  for (long idx = 0; idx < total; ++idx) cell(idx);
  return out;
}

void write_metrics_csv(const BatteryResult& battery, std::ostream& os) {
  os << "scenario,mode,heuristic,seed,cycles,collision,fallbacks,"
        "expanded_total,expanded_max,generated_total,plan_cost_sum,"
        "mean_accel_sq,mean_jerk_sq,wall_ms\n";
  os.precision(10);
  for (const MetricsRow& r : battery.rows) {
    os << r.scenario_id << ',' << mode_name(r.mode) << ','
       << heuristic_name(r.heuristic) << ',' << r.seed << ',' << r.cycles
       << ',' << (r.collision ? 1 : 0) << ',' << r.fallbacks << ','
       << r.expanded_total << ',' << r.expanded_max << ','
       << r.generated_total << ',' << r.plan_cost_sum << ','
       << r.mean_accel_sq << ',' << r.mean_jerk_sq << ',' << r.wall_ms
       << '\n';
  }
}

std::vector<std::string> battery_cross_checks(const BatteryResult& battery) {
  std::vector<std::string> failures;
  std::map<std::string, std::map<std::string, const MetricsRow*>> groups;
  for (const MetricsRow& r : battery.rows) {
    std::string key =
        r.scenario_id + "|" + std::to_string(r.seed) + "|" + mode_name(r.mode);
    groups[key][heuristic_name(r.heuristic)] = &r;
    if (r.collision)
      failures.push_back("collision: " + key + " " +
                         heuristic_name(r.heuristic));
  }
  for (const auto& [key, by_h] : groups) {
    auto a = by_h.find("h0");
    auto b = by_h.find("hall");
    if (a == by_h.end() || b == by_h.end()) continue;
    const MetricsRow& r0 = *a->second;
    const MetricsRow& r1 = *b->second;
    if (r0.cycle_costs.size() != r1.cycle_costs.size()) {
      failures.push_back("cycle count mismatch: " + key);
      continue;
    }
    for (std::size_t i = 0; i < r0.cycle_costs.size(); ++i) {
      double c0 = r0.cycle_costs[i], c1 = r1.cycle_costs[i];
      double tol = 1e-9 * std::max(1.0, std::max(std::abs(c0), std::abs(c1)));
      if (std::abs(c0 - c1) > tol) {
        failures.push_back("plan cost mismatch: " + key + " cycle " +
                           std::to_string(i));
        break;
      }
    }
    if (r1.expanded_total > r0.expanded_total)
      failures.push_back("full heuristic expanded more nodes: " + key);
  }
  return failures;
}

}  // namespace gbplan
