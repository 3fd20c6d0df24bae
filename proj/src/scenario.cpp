#include "gbplan/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gbplan/errors.hpp"

using nlohmann::json;

namespace gbplan {

namespace {

double get_num(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_number())
    throw InvalidInput(std::string("scenario: '") + key + "' must be a number");
  return j[key].get<double>();
}

double req_num(const json& j, const char* key, const char* ctx) {
  if (!j.contains(key) || !j[key].is_number())
    throw InvalidInput(std::string("scenario: ") + ctx + " requires numeric '" +
                       key + "'");
  return j[key].get<double>();
}

std::string req_str(const json& j, const char* key, const char* ctx) {
  if (!j.contains(key) || !j[key].is_string())
    throw InvalidInput(std::string("scenario: ") + ctx + " requires string '" +
                       key + "'");
  return j[key].get<std::string>();
}

IdmParams parse_idm(const json& j, IdmParams base) {
  base.v_desired = get_num(j, "v_desired", base.v_desired);
  base.time_headway = get_num(j, "time_headway", base.time_headway);
  base.min_gap = get_num(j, "min_gap", base.min_gap);
  base.a_max = get_num(j, "a_max", base.a_max);
  base.b_comf = get_num(j, "b_comf", base.b_comf);
  base.delta = get_num(j, "delta", base.delta);
  base.b_hard = get_num(j, "b_hard", base.b_hard);
  return base;
}

json idm_to_json(const IdmParams& p) {
  return json{{"v_desired", p.v_desired},   {"time_headway", p.time_headway},
              {"min_gap", p.min_gap},       {"a_max", p.a_max},
              {"b_comf", p.b_comf},         {"delta", p.delta},
              {"b_hard", p.b_hard}};
}

const char* status_name(SearchStatus s) {
  switch (s) {
    case SearchStatus::found: return "found";
    case SearchStatus::no_solution: return "no_solution";
    default: return "limit";
  }
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("scenario: bad JSON: ") + e.what());
  }

  Scenario sc;
  if (j.contains("schema_version") &&
      j["schema_version"].get<int>() != 1)
    throw InvalidInput("scenario: unsupported schema_version");
  sc.id = j.value("id", std::string("unnamed"));
  if (!j.contains("seed") || !j["seed"].is_number())
    throw InvalidInput("scenario: 'seed' is required");
  sc.seed = j["seed"].get<std::uint64_t>();
  sc.steps = static_cast<int>(get_num(j, "steps", 30));
  if (sc.steps < 1) throw InvalidInput("scenario: steps must be >= 1");

  if (!j.contains("lanes") || !j["lanes"].is_array() || j["lanes"].empty())
    throw InvalidInput("scenario: 'lanes' must be a non-empty array");
  for (const json& lj : j["lanes"]) {
    std::string id = req_str(lj, "id", "lane");
    if (!lj.contains("waypoints") || !lj["waypoints"].is_array())
      throw InvalidInput("scenario: lane '" + id + "' needs waypoints");
    std::vector<Vec2> pts;
    for (const json& wp : lj["waypoints"]) {
      if (!wp.is_array() || wp.size() != 2)
        throw InvalidInput("scenario: waypoints must be [x, y] pairs");
      pts.push_back(Vec2{wp[0].get<double>(), wp[1].get<double>()});
    }
    LanePath lane =
        build_lane_path(id, pts, get_num(lj, "resample_step", 1.0));
    lane.speed_limit = get_num(lj, "speed_limit", lane.speed_limit);
    if (lj.contains("left_neighbor") && lj["left_neighbor"].is_string())
      lane.left_neighbor = lj["left_neighbor"].get<std::string>();
    if (lj.contains("right_neighbor") && lj["right_neighbor"].is_string())
      lane.right_neighbor = lj["right_neighbor"].get<std::string>();
    sc.road.lanes.emplace(id, std::move(lane));
  }

  if (!j.contains("ego") || !j["ego"].is_object())
    throw InvalidInput("scenario: 'ego' is required");
  const json& ej = j["ego"];
  sc.ego.lane = req_str(ej, "lane", "ego");
  const LanePath& ego_lane = sc.road.at(sc.ego.lane);
  sc.ego.s = req_num(ej, "s", "ego");
  sc.ego.d = get_num(ej, "d", 0.0);
  sc.ego.v = req_num(ej, "v", "ego");
  sc.ego.a = get_num(ej, "a", 0.0);
  sc.ego.k = 0;
  if (sc.ego.v < 0.0) throw InvalidInput("scenario: ego.v must be >= 0");
  double tr = get_num(ej, "theta_rel", 0.0);
  CartesianPose ep = offset_pose_extrapolated(ego_lane, sc.ego.s, sc.ego.d, tr);
  sc.ego.theta = ep.theta;
  sc.ego.kappa = ep.kappa;
  sc.planner.ego_length = get_num(ej, "length", sc.planner.ego_length);
  sc.planner.ego_width = get_num(ej, "width", sc.planner.ego_width);
  sc.planner.v_desired = get_num(ej, "v_desired", ego_lane.speed_limit);

  if (j.contains("agents")) {
    if (!j["agents"].is_array())
      throw InvalidInput("scenario: 'agents' must be an array");
    int index = 0;
    for (const json& aj : j["agents"]) {
      AgentSpec spec;
      spec.id = aj.value("id", "agent" + std::to_string(index));
      spec.lane = req_str(aj, "lane", "agent");
      sc.road.at(spec.lane);  // must exist
      spec.s = req_num(aj, "s", "agent");
      spec.v = req_num(aj, "v", "agent");
      if (spec.v < 0.0) throw InvalidInput("scenario: agent v must be >= 0");
      spec.length = get_num(aj, "length", spec.length);
      spec.width = get_num(aj, "width", spec.width);
      if (!aj.contains("behavior") || !aj["behavior"].is_object())
        throw InvalidInput("scenario: agent '" + spec.id + "' needs behavior");
      const json& bj = aj["behavior"];
      std::string type = req_str(bj, "type", "behavior");
      if (type == "random_accel") {
        spec.behavior = AgentBehavior::random_accel;
        spec.accel_lo = get_num(bj, "lo", spec.accel_lo);
        spec.accel_hi = get_num(bj, "hi", spec.accel_hi);
        if (spec.accel_lo > spec.accel_hi)
          throw InvalidInput("scenario: random_accel lo > hi");
      } else if (type == "idm_follow") {
        spec.behavior = AgentBehavior::idm_follow;
        spec.idm = parse_idm(bj, spec.idm);
      } else {
        throw InvalidInput("scenario: unknown behavior '" + type + "'");
      }
      sc.agents.push_back(std::move(spec));
      ++index;
    }
  }

  if (j.contains("weights")) {
    const json& wj = j["weights"];
    sc.weights.w_front = get_num(wj, "w_front", sc.weights.w_front);
    sc.weights.w_cut_in = get_num(wj, "w_cut_in", sc.weights.w_cut_in);
    sc.weights.w_velocity = get_num(wj, "w_velocity", sc.weights.w_velocity);
    sc.weights.w_accel = get_num(wj, "w_accel", sc.weights.w_accel);
    sc.weights.w_accel_rate =
        get_num(wj, "w_accel_rate", sc.weights.w_accel_rate);
    sc.weights.w_lane_change =
        get_num(wj, "w_lane_change", sc.weights.w_lane_change);
    sc.weights.tau_front = get_num(wj, "tau_front", sc.weights.tau_front);
  }

  if (j.contains("planner")) {
    const json& pj = j["planner"];
    PlannerConfig& p = sc.planner;
    p.dt = get_num(pj, "dt", p.dt);
    p.horizon_steps = static_cast<int>(get_num(pj, "horizon_steps",
                                               p.horizon_steps));
    if (pj.contains("accel_set")) {
      p.accel_set.clear();
      for (const json& a : pj["accel_set"]) p.accel_set.push_back(a.get<double>());
    }
    p.idm_gate_margin = get_num(pj, "idm_gate_margin", p.idm_gate_margin);
    p.max_accel_step = get_num(pj, "max_accel_step", p.max_accel_step);
    p.v_desired = get_num(pj, "v_desired", p.v_desired);
    p.max_expansions =
        static_cast<long>(get_num(pj, "max_expansions",
                                  static_cast<double>(p.max_expansions)));
    p.kappa_max = get_num(pj, "kappa_max", p.kappa_max);
    p.kappa_dot_max = get_num(pj, "kappa_dot_max", p.kappa_dot_max);
    p.a_abs_max = get_num(pj, "a_abs_max", p.a_abs_max);
    p.profile_jerk_max = get_num(pj, "profile_jerk_max", p.profile_jerk_max);
    p.profile_accel_max = get_num(pj, "profile_accel_max", p.profile_accel_max);
    p.lane_change_substep =
        get_num(pj, "lane_change_substep", p.lane_change_substep);
    p.pursuit_min_lookahead =
        get_num(pj, "pursuit_min_lookahead", p.pursuit_min_lookahead);
    p.pursuit_time_gap = get_num(pj, "pursuit_time_gap", p.pursuit_time_gap);
    p.safety_margin = get_num(pj, "safety_margin", p.safety_margin);
    p.align_d_tol = get_num(pj, "align_d_tol", p.align_d_tol);
    p.align_theta_tol = get_num(pj, "align_theta_tol", p.align_theta_tol);
    p.corridor_half_width =
        get_num(pj, "corridor_half_width", p.corridor_half_width);
    p.following_range_factor =
        get_num(pj, "following_range_factor", p.following_range_factor);
    if (pj.contains("idm")) p.idm = parse_idm(pj["idm"], p.idm);
    if (pj.contains("mobil")) {
      const json& mj = pj["mobil"];
      p.mobil.politeness = get_num(mj, "politeness", p.mobil.politeness);
      p.mobil.a_threshold = get_num(mj, "a_threshold", p.mobil.a_threshold);
      p.mobil.b_safe = get_num(mj, "b_safe", p.mobil.b_safe);
    }
  }

  sc.planner.validate();
  sc.weights.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("scenario: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario sc = parse_scenario_text(buf.str());
  if (sc.id == "unnamed") {
    auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    sc.id = dot == std::string::npos ? base : base.substr(0, dot);
  }
  return sc;
}

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["schema_version"] = 1;
  j["id"] = sc.id;
  j["seed"] = sc.seed;
  j["steps"] = sc.steps;

  json lanes = json::array();
  for (const auto& [id, lane] : sc.road.lanes) {
    json lj;
    lj["id"] = id;
    json wps = json::array();
    for (const Vec2& p : lane.points) wps.push_back(json::array({p.x, p.y}));
    lj["waypoints"] = wps;
    lj["resample_step"] =
        lane.points.size() > 1 ? lane.arc_lengths[1] - lane.arc_lengths[0] : 1.0;
    lj["speed_limit"] = lane.speed_limit;
    if (lane.left_neighbor) lj["left_neighbor"] = *lane.left_neighbor;
    if (lane.right_neighbor) lj["right_neighbor"] = *lane.right_neighbor;
    lanes.push_back(lj);
  }
  j["lanes"] = lanes;

  const LanePath& ego_lane = sc.road.at(sc.ego.lane);
  j["ego"] = json{{"lane", sc.ego.lane},
                  {"s", sc.ego.s},
                  {"d", sc.ego.d},
                  {"theta_rel", theta_rel(sc.ego, ego_lane)},
                  {"v", sc.ego.v},
                  {"a", sc.ego.a},
                  {"length", sc.planner.ego_length},
                  {"width", sc.planner.ego_width},
                  {"v_desired", sc.planner.v_desired}};

  json agents = json::array();
  for (const AgentSpec& a : sc.agents) {
    json aj;
    aj["id"] = a.id;
    aj["lane"] = a.lane;
    aj["s"] = a.s;
    aj["v"] = a.v;
    aj["length"] = a.length;
    aj["width"] = a.width;
    if (a.behavior == AgentBehavior::random_accel) {
      aj["behavior"] =
          json{{"type", "random_accel"}, {"lo", a.accel_lo}, {"hi", a.accel_hi}};
    } else {
      json bj = idm_to_json(a.idm);
      bj["type"] = "idm_follow";
      aj["behavior"] = bj;
    }
    agents.push_back(aj);
  }
  j["agents"] = agents;

  j["weights"] = json{{"w_front", sc.weights.w_front},
                      {"w_cut_in", sc.weights.w_cut_in},
                      {"w_velocity", sc.weights.w_velocity},
                      {"w_accel", sc.weights.w_accel},
                      {"w_accel_rate", sc.weights.w_accel_rate},
                      {"w_lane_change", sc.weights.w_lane_change},
                      {"tau_front", sc.weights.tau_front}};

  const PlannerConfig& p = sc.planner;
  j["planner"] = json{{"dt", p.dt},
                      {"horizon_steps", p.horizon_steps},
                      {"accel_set", p.accel_set},
                      {"idm_gate_margin", p.idm_gate_margin},
                      {"max_accel_step", p.max_accel_step},
                      {"v_desired", p.v_desired},
                      {"max_expansions", p.max_expansions},
                      {"kappa_max", p.kappa_max},
                      {"kappa_dot_max", p.kappa_dot_max},
                      {"a_abs_max", p.a_abs_max},
                      {"profile_jerk_max", p.profile_jerk_max},
                      {"profile_accel_max", p.profile_accel_max},
                      {"lane_change_substep", p.lane_change_substep},
                      {"pursuit_min_lookahead", p.pursuit_min_lookahead},
                      {"pursuit_time_gap", p.pursuit_time_gap},
                      {"safety_margin", p.safety_margin},
                      {"align_d_tol", p.align_d_tol},
                      {"align_theta_tol", p.align_theta_tol},
                      {"corridor_half_width", p.corridor_half_width},
                      {"following_range_factor", p.following_range_factor},
                      {"idm", idm_to_json(p.idm)},
                      {"mobil", json{{"politeness", p.mobil.politeness},
                                     {"a_threshold", p.mobil.a_threshold},
                                     {"b_safe", p.mobil.b_safe}}}};
  return j.dump(2);
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("scenario: cannot write " + path);
  out << scenario_to_json(sc) << '\n';
}

void write_sim_log(std::ostream& os, const Scenario& sc, const SimConfig& sim,
                   const SimResult& result) {
  json header{{"type", "header"},
              {"scenario", sc.id},
              {"seed", sim.seed},
              {"mode", sim.mode == BranchingMode::proposed    ? "proposed"
                       : sim.mode == BranchingMode::passive   ? "passive"
                                                              : "baseline"},
              {"heuristic",
               sim.heuristic == HeuristicKind::none ? "h0" : "hall"},
              {"steps", sim.steps}};
  os << header.dump() << '\n';
  for (const CycleRecord& c : result.cycles) {
    json line{{"type", "cycle"},
              {"cycle", c.cycle},
              {"status", status_name(c.status)},
              {"cost", c.plan_cost},
              {"expanded", c.expanded},
              {"generated", c.generated},
              {"fallback", c.fallback},
              {"emergency", c.emergency},
              {"ego", json{{"lane", c.ego.lane},
                           {"s", c.ego.s},
                           {"d", c.ego.d},
                           {"v", c.ego.v},
                           {"a", c.ego.a}}}};
    os << line.dump() << '\n';
  }
  ComfortMetrics cm = comfort_metrics(result.driven);
  json summary{{"type", "summary"},
               {"collision", result.collision},
               {"collision_cycle", result.collision_cycle},
               {"fallbacks", result.fallback_count},
               {"expanded_total", result.total_expanded},
               {"generated_total", result.total_generated},
               {"mean_accel_sq", cm.mean_accel_sq},
               {"mean_jerk_sq", cm.mean_jerk_sq},
               {"final_lane", result.final_ego.lane},
               {"final_s", result.final_ego.s},
               {"final_v", result.final_ego.v}};
  os << summary.dump() << '\n';
}

ComfortMetrics comfort_metrics(const std::vector<TrajectoryPoint>& driven) {
  ComfortMetrics out;
  if (driven.size() < 2) return out;
  double accel_int = 0.0, jerk_int = 0.0, total = 0.0;
  for (std::size_t i = 0; i + 1 < driven.size(); ++i) {
    double h = driven[i + 1].t - driven[i].t;
    if (h <= 0.0) continue;
    double a0 = driven[i].a, a1 = driven[i + 1].a;
    accel_int += (a0 * a0 + a0 * a1 + a1 * a1) / 3.0 * h;
    double j0 = driven[i].jerk, j1 = driven[i + 1].jerk;
    jerk_int += 0.5 * (j0 * j0 + j1 * j1) * h;
    total += h;
  }
  if (total > 0.0) {
    out.mean_accel_sq = accel_int / total;
    out.mean_jerk_sq = jerk_int / total;
  }
  return out;
}

ScenarioTemplate template_from_name(const std::string& name) {
  if (name == "two_lane_road") return ScenarioTemplate::two_lane_road;
  if (name == "lane_change") return ScenarioTemplate::lane_change;
  if (name == "on_ramp") return ScenarioTemplate::on_ramp;
  if (name == "left_turn") return ScenarioTemplate::left_turn;
  throw InvalidInput("unknown scenario template '" + name + "'");
}

std::string template_name(ScenarioTemplate t) {
  switch (t) {
    case ScenarioTemplate::two_lane_road: return "two_lane_road";
    case ScenarioTemplate::lane_change: return "lane_change";
    case ScenarioTemplate::on_ramp: return "on_ramp";
    default: return "left_turn";
  }
}

namespace {

std::vector<Vec2> straight(double x0, double y0, double x1, double y1,
                           double spacing) {
  std::vector<Vec2> pts;
  double dx = x1 - x0, dy = y1 - y0;
  double len = std::hypot(dx, dy);
  int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
  for (int i = 0; i <= n; ++i) {
    double u = static_cast<double>(i) / n;
    pts.push_back(Vec2{x0 + u * dx, y0 + u * dy});
  }
  return pts;
}

void link(RoadMap& road, const std::string& right_id,
          const std::string& left_id) {
  road.lanes.at(right_id).left_neighbor = left_id;
  road.lanes.at(left_id).right_neighbor = right_id;
}

AgentSpec random_agent(const std::string& id, const std::string& lane,
                       double s, double v, double band) {
  AgentSpec a;
  a.id = id;
  a.lane = lane;
  a.s = s;
  a.v = v;
  a.behavior = AgentBehavior::random_accel;
  a.accel_lo = -band;
  a.accel_hi = band;
  return a;
}

}  // namespace

Scenario generate_scenario(ScenarioTemplate t, std::uint64_t seed) {
  Scenario sc;
  sc.id = template_name(t) + "_" + std::to_string(seed);
  sc.seed = seed;
  sc.steps = 25;
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);

  switch (t) {
    case ScenarioTemplate::two_lane_road: {
      double vd = uniform_draw(rng, 11.0, 14.0);
      sc.road.lanes.emplace(
          "right", build_lane_path("right", straight(0, 0, 500, 0, 20), 1.0));
      sc.road.lanes.emplace(
          "left", build_lane_path("left", straight(0, 3.5, 500, 3.5, 20), 1.0));
      link(sc.road, "right", "left");
      sc.road.lanes.at("right").speed_limit = vd;
      sc.road.lanes.at("left").speed_limit = vd;
      sc.ego.lane = "right";
      sc.ego.s = 30.0;
      sc.ego.v = vd * uniform_draw(rng, 0.7, 1.0);
      double lead_s = sc.ego.s + uniform_draw(rng, 45.0, 85.0);
      double lead_v = vd * uniform_draw(rng, 0.55, 0.85);
      sc.agents.push_back(
          random_agent("lead", "right", lead_s, lead_v, 0.3));
      sc.agents.push_back(random_agent(
          "left_traffic", "left", sc.ego.s + uniform_draw(rng, -15.0, 50.0),
          vd * uniform_draw(rng, 0.6, 0.9), 0.3));
      if ((seed & 1u) == 0) {
        AgentSpec rear;
        rear.id = "rear";
        rear.lane = "right";
        rear.s = sc.ego.s - uniform_draw(rng, 28.0, 45.0);
        rear.v = vd * uniform_draw(rng, 0.6, 0.8);
        rear.behavior = AgentBehavior::idm_follow;
        rear.idm.v_desired = vd * 0.9;
        sc.agents.push_back(rear);
      }
      break;
    }
    case ScenarioTemplate::lane_change: {
      double vd = uniform_draw(rng, 11.5, 13.5);
      sc.road.lanes.emplace(
          "right", build_lane_path("right", straight(0, 0, 500, 0, 20), 1.0));
      sc.road.lanes.emplace(
          "left", build_lane_path("left", straight(0, 3.5, 500, 3.5, 20), 1.0));
      link(sc.road, "right", "left");
      sc.road.lanes.at("right").speed_limit = vd;
      sc.road.lanes.at("left").speed_limit = vd;
      sc.ego.lane = "right";
      sc.ego.s = 40.0;
      sc.ego.v = vd * uniform_draw(rng, 0.8, 1.0);
      sc.agents.push_back(random_agent(
          "slow_lead", "right", sc.ego.s + uniform_draw(rng, 38.0, 60.0),
          vd * uniform_draw(rng, 0.3, 0.5), 0.2));
      sc.agents.push_back(random_agent(
          "far_left", "left", sc.ego.s + uniform_draw(rng, 90.0, 140.0),
          vd * uniform_draw(rng, 0.7, 0.95), 0.3));
      break;
    }
    case ScenarioTemplate::on_ramp: {
      double vd = uniform_draw(rng, 10.5, 13.0);
      sc.road.lanes.emplace(
          "ramp", build_lane_path("ramp", straight(0, 0, 260, 0, 20), 1.0));
      sc.road.lanes.emplace(
          "main", build_lane_path("main", straight(0, 3.5, 520, 3.5, 20), 1.0));
      // one-way link: traffic merges off the ramp, never back onto it
      sc.road.lanes.at("ramp").left_neighbor = "main";
      sc.road.lanes.at("ramp").speed_limit = vd;
      sc.road.lanes.at("main").speed_limit = vd;
      sc.ego.lane = "ramp";
      sc.ego.s = 25.0;
      sc.ego.v = vd * uniform_draw(rng, 0.65, 0.9);
      // dead end: a parked vehicle blocks the ramp, so the ego must merge
      sc.agents.push_back(random_agent(
          "blocker", "ramp", uniform_draw(rng, 140.0, 175.0), 0.0, 0.0));
      sc.agents.push_back(random_agent(
          "main_rear", "main", sc.ego.s - uniform_draw(rng, 12.0, 35.0),
          vd * uniform_draw(rng, 0.7, 0.9), 0.3));
      sc.agents.push_back(random_agent(
          "main_lead", "main", sc.ego.s + uniform_draw(rng, 35.0, 70.0),
          vd * uniform_draw(rng, 0.75, 0.95), 0.3));
      break;
    }
    case ScenarioTemplate::left_turn: {
      double vd = uniform_draw(rng, 7.5, 9.5);
      const double R = 15.0;
      std::vector<Vec2> turn = straight(0, -60, 0, -15 - 2.0, 5.0);
      for (int i = 0; i <= 12; ++i) {
        double phi = (3.141592653589793 / 2.0) * i / 12.0;
        turn.push_back(Vec2{-R + R * std::cos(phi), -15.0 + R * std::sin(phi)});
      }
      for (const Vec2& p : straight(-R - 2.0, 0, -95, 0, 5.0))
        turn.push_back(p);
      sc.road.lanes.emplace("turn", build_lane_path("turn", turn, 1.0));
      sc.road.lanes.emplace(
          "oncoming",
          build_lane_path("oncoming", straight(-3.5, 80, -3.5, -60, 20), 1.0));
      sc.road.lanes.at("turn").speed_limit = vd;
      sc.road.lanes.at("oncoming").speed_limit = 12.0;
      sc.ego.lane = "turn";
      sc.ego.s = 10.0;
      sc.ego.v = vd * uniform_draw(rng, 0.7, 1.0);
      // oncoming crosses the turn arc; offset its arrival around the ego's
      double v_onc = uniform_draw(rng, 8.0, 11.0);
      double t_offset = uniform_draw(rng, 3.0, 9.0);
      double s_conflict = 80.0 - (-10.0);  // oncoming s at the crossing area
      sc.agents.push_back(random_agent(
          "oncoming_a", "oncoming",
          std::max(0.0, s_conflict - v_onc * t_offset), v_onc, 0.2));
      if ((seed & 1u) == 1) {
        sc.agents.push_back(random_agent(
            "oncoming_b", "oncoming",
            std::max(0.0, s_conflict - v_onc * (t_offset + 4.0)),
            v_onc * uniform_draw(rng, 0.85, 1.0), 0.2));
      }
      break;
    }
  }

  const LanePath& ego_lane = sc.road.at(sc.ego.lane);
  CartesianPose ep = offset_pose_extrapolated(ego_lane, sc.ego.s, 0.0, 0.0);
  sc.ego.d = 0.0;
  sc.ego.theta = ep.theta;
  sc.ego.kappa = ep.kappa;
  sc.ego.a = 0.0;
  sc.ego.k = 0;
  sc.planner.v_desired = ego_lane.speed_limit;
  return sc;
}

std::vector<Scenario> generate_batch(const std::vector<ScenarioTemplate>& ts,
                                     int count, std::uint64_t base_seed) {
  if (ts.empty()) throw InvalidInput("generate_batch: no templates");
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out.push_back(
        generate_scenario(ts[static_cast<std::size_t>(i) % ts.size()],
                          base_seed + static_cast<std::uint64_t>(i)));
  return out;
}

}  // namespace gbplan
