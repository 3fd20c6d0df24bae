#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gbplan/battery.hpp"
#include "gbplan/errors.hpp"
#include "gbplan/scenario.hpp"

namespace fs = std::filesystem;
using namespace gbplan;

namespace {

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<AgentState> initial_states(const std::vector<AgentSpec>& specs) {
  std::vector<AgentState> st(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i)
    st[i] = AgentState{specs[i].s, specs[i].v, 0.0};
  return st;
}

void write_driven_csv(const std::vector<TrajectoryPoint>& driven,
                      std::ostream& os) {
  os << "t,x,y,theta,v,a,jerk\n";
  os.precision(10);
  for (const TrajectoryPoint& p : driven) {
    os << p.t << ',' << p.x << ',' << p.y << ',' << p.theta << ',' << p.v
       << ',' << p.a << ',' << p.jerk << '\n';
  }
}

const char* action_label(const Action& a) {
  if (a.lat == LateralAction::left) return "change_left";
  if (a.lat == LateralAction::right) return "change_right";
  return a.lon == Action::Lon::accel_target ? "accel" : "velocity";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-based behavior and trajectory planner"};
  app.require_subcommand(1);

  auto* gen_cmd = app.add_subcommand("gen", "write generated scenario files");
  std::string gen_out;
  int gen_count = 20;
  std::uint64_t gen_seed = 1;
  std::string gen_templates = "all";
  gen_cmd->add_option("--out", gen_out, "output directory")->required();
  gen_cmd->add_option("--count", gen_count, "number of scenarios");
  gen_cmd->add_option("--seed", gen_seed, "base seed");
  gen_cmd->add_option("--templates", gen_templates,
                      "comma list of templates, or 'all'");

  auto* plan_cmd =
      app.add_subcommand("plan", "run one planning cycle from the start state");
  std::string plan_scn, plan_mode = "proposed", plan_heur = "hall", plan_out;
  plan_cmd->add_option("--scenario", plan_scn, "scenario JSON file")
      ->required();
  plan_cmd->add_option("--mode", plan_mode, "proposed|passive|baseline");
  plan_cmd->add_option("--heuristic", plan_heur, "h0|hall");
  plan_cmd->add_option("--out", plan_out, "write the refined plan as CSV");

  auto* sim_cmd = app.add_subcommand("simulate", "closed-loop run");
  std::string sim_scn, sim_mode = "proposed", sim_heur = "hall";
  std::string sim_log, sim_traj;
  int sim_steps = 0;
  std::uint64_t sim_seed = 0;
  bool sim_seed_set = false;
  sim_cmd->add_option("--scenario", sim_scn, "scenario JSON file")->required();
  sim_cmd->add_option("--mode", sim_mode, "proposed|passive|baseline");
  sim_cmd->add_option("--heuristic", sim_heur, "h0|hall");
  sim_cmd->add_option("--steps", sim_steps, "override planning cycles");
  sim_cmd->add_option("--seed", sim_seed, "override simulation seed")
      ->each([&](const std::string&) { sim_seed_set = true; });
  sim_cmd->add_option("--log", sim_log, "write per-cycle JSONL log");
  sim_cmd->add_option("--traj", sim_traj, "write driven trajectory CSV");

  auto* bench_cmd =
      app.add_subcommand("bench", "batch closed-loop runs with cross-checks");
  std::string bench_dir, bench_out;
  int bench_gen = 0, bench_jobs = 1;
  std::uint64_t bench_seed = 1;
  std::string bench_modes = "proposed,passive,baseline";
  std::string bench_heurs = "h0,hall";
  bench_cmd->add_option("--dir", bench_dir, "directory of scenario JSON files");
  bench_cmd->add_option("--generate", bench_gen,
                        "additionally generate this many scenarios");
  bench_cmd->add_option("--seed", bench_seed, "base seed for --generate");
  bench_cmd->add_option("--modes", bench_modes, "comma list of modes");
  bench_cmd->add_option("--heuristics", bench_heurs,
                        "comma list of heuristics");
  bench_cmd->add_option("--jobs", bench_jobs, "parallel cells (1 = serial)");
  bench_cmd->add_option("--out", bench_out, "write per-cell metrics CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      std::vector<ScenarioTemplate> ts;
      if (gen_templates == "all") {
        ts = {ScenarioTemplate::two_lane_road, ScenarioTemplate::lane_change,
              ScenarioTemplate::on_ramp, ScenarioTemplate::left_turn};
      } else {
        for (const std::string& name : split_csv(gen_templates))
          ts.push_back(template_from_name(name));
      }
      fs::create_directories(gen_out);
      std::vector<Scenario> scns = generate_batch(ts, gen_count, gen_seed);
      for (const Scenario& sc : scns)
        save_scenario(sc, gen_out + "/" + sc.id + ".json");
      std::cout << "wrote " << scns.size() << " scenarios to " << gen_out
                << "\n";
      return 0;
    }

    if (plan_cmd->parsed()) {
      Scenario sc = load_scenario(plan_scn);
      std::vector<AgentState> st = initial_states(sc.agents);
      PredictionSet pred = predict_agents(sc.agents, st,
                                          sc.planner.horizon_steps,
                                          sc.planner.dt);
      WorldView world{&sc.road, &pred};
      SearchResult res = plan(sc.ego, world, sc.planner, sc.weights,
                              mode_from_name(plan_mode),
                              heuristic_from_name(plan_heur));
      std::cout << "status=" << (res.status == SearchStatus::found
                                     ? "found"
                                     : res.status == SearchStatus::no_solution
                                           ? "no_solution"
                                           : "limit")
                << " cost=" << res.total_cost << " expanded=" << res.expanded
                << " generated=" << res.generated << "\n";
      for (const PlanStep& step : res.steps) {
        std::cout << "  k=" << step.state.k << " " << action_label(step.action)
                  << "(" << step.action.value << ")"
                  << " lane=" << step.state.lane << " s=" << step.state.s
                  << " v=" << step.state.v << " a=" << step.state.a
                  << " g=" << step.g << "\n";
      }
      if (!plan_out.empty() && res.status == SearchStatus::found) {
        RefinedTrajectory refined =
            refine(sc.ego, res.steps, sc.road, sc.planner);
        std::ofstream out(plan_out);
        if (!out) throw InvalidInput("cannot write " + plan_out);
        write_csv(refined, out);
        std::cout << "wrote " << plan_out << "\n";
      }
      return res.status == SearchStatus::found ? 0 : 1;
    }

    if (sim_cmd->parsed()) {
      Scenario sc = load_scenario(sim_scn);
      SimConfig sim;
      sim.steps = sim_steps > 0 ? sim_steps : sc.steps;
      sim.seed = sim_seed_set ? sim_seed : sc.seed;
      sim.mode = mode_from_name(sim_mode);
      sim.heuristic = heuristic_from_name(sim_heur);
      SimResult r = run_closed_loop(sc.road, sc.ego, sc.agents, sc.planner,
                                    sc.weights, sim);
      ComfortMetrics cm = comfort_metrics(r.driven);
      std::cout << "cycles=" << r.cycles.size()
                << " collision=" << (r.collision ? 1 : 0)
                << " fallbacks=" << r.fallback_count
                << " expanded_total=" << r.total_expanded
                << " generated_total=" << r.total_generated
                << " mean_accel_sq=" << cm.mean_accel_sq
                << " mean_jerk_sq=" << cm.mean_jerk_sq
                << " final_lane=" << r.final_ego.lane
                << " final_s=" << r.final_ego.s << " final_v=" << r.final_ego.v
                << "\n";
      if (!sim_log.empty()) {
        std::ofstream out(sim_log);
        if (!out) throw InvalidInput("cannot write " + sim_log);
        write_sim_log(out, sc, sim, r);
      }
      if (!sim_traj.empty()) {
        std::ofstream out(sim_traj);
        if (!out) throw InvalidInput("cannot write " + sim_traj);
        write_driven_csv(r.driven, out);
      }
      return r.collision ? 1 : 0;
    }

    if (bench_cmd->parsed()) {
      std::vector<Scenario> scns;
      if (!bench_dir.empty()) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(bench_dir))
          if (entry.path().extension() == ".json")
            files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
        for (const std::string& f : files) scns.push_back(load_scenario(f));
      }
      if (bench_gen > 0) {
        std::vector<ScenarioTemplate> ts = {
            ScenarioTemplate::two_lane_road, ScenarioTemplate::lane_change,
            ScenarioTemplate::on_ramp, ScenarioTemplate::left_turn};
        for (Scenario& sc : generate_batch(ts, bench_gen, bench_seed))
          scns.push_back(std::move(sc));
      }
      if (scns.empty())
        throw InvalidInput("bench: no scenarios (use --dir or --generate)");

      std::vector<BranchingMode> modes;
      for (const std::string& m : split_csv(bench_modes))
        modes.push_back(mode_from_name(m));
      std::vector<HeuristicKind> heurs;
      for (const std::string& h : split_csv(bench_heurs))
        heurs.push_back(heuristic_from_name(h));

      BatteryResult br = run_battery(scns, modes, heurs, bench_jobs);

      for (BranchingMode m : modes) {
        for (HeuristicKind h : heurs) {
          long expanded = 0, generated = 0, cycles = 0;
          int collisions = 0, fallbacks = 0;
          double accel_sq = 0.0, jerk_sq = 0.0, wall = 0.0;
          int count = 0;
          for (const MetricsRow& r : br.rows) {
            if (r.mode != m || r.heuristic != h) continue;
            ++count;
            expanded += r.expanded_total;
            generated += r.generated_total;
            cycles += r.cycles;
            collisions += r.collision ? 1 : 0;
            fallbacks += r.fallbacks;
            accel_sq += r.mean_accel_sq;
            jerk_sq += r.mean_jerk_sq;
            wall += r.wall_ms;
          }
          if (count == 0) continue;
          std::cout << "mode=" << mode_name(m)
                    << " heuristic=" << heuristic_name(h)
                    << " scenarios=" << count << " collisions=" << collisions
                    << " fallbacks=" << fallbacks << " expanded_per_cycle="
                    << (cycles ? static_cast<double>(expanded) / cycles : 0.0)
                    << " generated_per_cycle="
                    << (cycles ? static_cast<double>(generated) / cycles : 0.0)
                    << " mean_accel_sq=" << accel_sq / count
                    << " mean_jerk_sq=" << jerk_sq / count
                    << " wall_ms=" << wall << "\n";
        }
      }

      if (!bench_out.empty()) {
        std::ofstream out(bench_out);
        if (!out) throw InvalidInput("cannot write " + bench_out);
        write_metrics_csv(br, out);
        std::cout << "wrote " << bench_out << "\n";
      }

      std::vector<std::string> failures = battery_cross_checks(br);
      for (const std::string& f : failures)
        std::cout << "cross-check failed: " << f << "\n";
      std::cout << (failures.empty() ? "cross-checks passed"
                                     : "cross-checks FAILED")
                << " (" << br.rows.size() << " cells, jobs=" << br.jobs_used
                << ")\n";
      return failures.empty() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
