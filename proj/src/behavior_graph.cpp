#include "gbplan/behavior_graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace gbplan {

namespace {

constexpr double kEps = 1e-12;
constexpr double kFeasTol = 1e-9;

// Constant-jerk longitudinal motion over one step, with stop-and-hold once the
// velocity reaches zero on a descending crossing.
class LonStep {
 public:
  LonStep(double v0, double a0, double a_target, double dt)
      : v0_(v0), a0_(a0), jerk_((a_target - a0) / dt) {
    t_stop_ = find_stop(dt);
  }

  struct Eval {
    double ds;
    double v;
    double a;
  };

  Eval at(double t) const {
    if (t >= t_stop_) {
      Eval e = raw(t_stop_);
      return {e.ds, 0.0, 0.0};
    }
    return raw(t);
  }

  bool stops_within(double dt) const { return t_stop_ <= dt; }

 private:
  Eval raw(double t) const {
    return {v0_ * t + 0.5 * a0_ * t * t + jerk_ * t * t * t / 6.0,
            v0_ + a0_ * t + 0.5 * jerk_ * t * t, a0_ + jerk_ * t};
  }

  // Earliest descending zero crossing of v(t) in [0, dt]; +inf when none.
  double find_stop(double dt) const {
    double inf = std::numeric_limits<double>::infinity();
    if (v0_ <= kEps) {
      if (a0_ < -kEps) return 0.0;
      if (std::abs(a0_) <= kEps && jerk_ < -kEps) return 0.0;
    }
    auto descending = [&](double t) { return a0_ + jerk_ * t < kEps; };
    if (std::abs(jerk_) <= kEps) {
      if (a0_ >= -kEps) return inf;
      double t = -v0_ / a0_;
      return (t > kEps && t <= dt + kFeasTol) ? std::min(t, dt) : inf;
    }
    double disc = a0_ * a0_ - 2.0 * jerk_ * v0_;
    if (disc < 0.0) return inf;
    double sq = std::sqrt(disc);
    double best = inf;
    for (double t : {(-a0_ - sq) / jerk_, (-a0_ + sq) / jerk_}) {
      if (t > kEps && t <= dt + kFeasTol && descending(t)) best = std::min(best, std::min(t, dt));
    }
    return best;
  }

  double v0_;
  double a0_;
  double jerk_;
  double t_stop_ = 0.0;
};

double heading_extrapolated(const LanePath& lane, double s) {
  double len = lane.length();
  return lane.heading_at(std::clamp(s, 0.0, len));
}

int substep_count(const PlannerConfig& cfg) {
  return std::max(1, static_cast<int>(std::lround(cfg.dt / cfg.lane_change_substep)));
}

}  // namespace

void PlannerConfig::validate() const {
  if (dt <= 0.0) throw InvalidInput("PlannerConfig: dt must be > 0");
  if (horizon_steps < 1) throw InvalidInput("PlannerConfig: horizon_steps must be >= 1");
  if (accel_set.empty()) throw InvalidInput("PlannerConfig: accel_set must not be empty");
  if (v_desired <= 0.0) throw InvalidInput("PlannerConfig: v_desired must be > 0");
  if (max_accel_step <= 0.0) throw InvalidInput("PlannerConfig: max_accel_step must be > 0");
  if (max_expansions < 1) throw InvalidInput("PlannerConfig: max_expansions must be >= 1");
  if (kappa_max <= 0.0 || kappa_dot_max <= 0.0) {
    throw InvalidInput("PlannerConfig: curvature bounds must be > 0");
  }
  if (a_abs_max <= 0.0) throw InvalidInput("PlannerConfig: a_abs_max must be > 0");
  if (profile_jerk_max <= 0.0 || profile_accel_max <= 0.0) {
    throw InvalidInput("PlannerConfig: profile bounds must be > 0");
  }
  if (lane_change_substep <= 0.0 || lane_change_substep > dt) {
    throw InvalidInput("PlannerConfig: lane_change_substep must be in (0, dt]");
  }
  if (ego_length <= 0.0 || ego_width <= 0.0) {
    throw InvalidInput("PlannerConfig: ego footprint must be positive");
  }
  double a_hi = *std::max_element(accel_set.begin(), accel_set.end());
  if (idm.a_max < a_hi - 1e-9) {
    throw InvalidInput("PlannerConfig: idm.a_max must dominate the discrete accel range");
  }
}

CartesianPose lane_pose_extrapolated(const LanePath& lane, double s) {
  double len = lane.length();
  if (s >= 0.0 && s <= len) {
    Vec2 p = lane.point_at(s);
    return {p.x, p.y, lane.heading_at(s), lane.curvature_at(s)};
  }
  double s_ref = std::clamp(s, 0.0, len);
  double h = lane.heading_at(s_ref);
  Vec2 p = lane.point_at(s_ref);
  double ext = s - s_ref;
  return {p.x + ext * std::cos(h), p.y + ext * std::sin(h), h, 0.0};
}

CartesianPose offset_pose_extrapolated(const LanePath& lane, double s, double d,
                                       double theta_rel_in) {
  CartesianPose c = lane_pose_extrapolated(lane, s);
  double kc = c.kappa;
  double denom = 1.0 - d * kc;
  double kappa = denom > 0.05 ? kc / denom : kc / 0.05;
  CartesianPose out;
  out.x = c.x - d * std::sin(c.theta);
  out.y = c.y + d * std::cos(c.theta);
  out.theta = wrap_angle(c.theta + theta_rel_in);
  out.kappa = kappa;
  return out;
}

double theta_rel(const VehicleState& state, const LanePath& lane) {
  return wrap_angle(state.theta - heading_extrapolated(lane, state.s));
}

bool lane_aligned(const VehicleState& state, const LanePath& lane, const PlannerConfig& cfg) {
  return std::abs(state.d) <= cfg.align_d_tol &&
         std::abs(theta_rel(state, lane)) <= cfg.align_theta_tol;
}

std::optional<NeighborAgent> front_agent(const PredictionSet& predictions,
                                         const std::string& lane, double s, int k) {
  std::optional<NeighborAgent> best;
  for (const auto& agent : predictions.agents) {
    if (agent.lane != lane || agent.hypotheses.empty()) continue;
    PredictedState ps = agent.state_at(agent.most_likely(), k);
    if (ps.s < s) continue;
    if (!best || ps.s < best->s) best = NeighborAgent{&agent, ps.s, ps.v};
  }
  return best;
}

std::optional<NeighborAgent> rear_agent(const PredictionSet& predictions,
                                        const std::string& lane, double s, int k) {
  std::optional<NeighborAgent> best;
  for (const auto& agent : predictions.agents) {
    if (agent.lane != lane || agent.hypotheses.empty()) continue;
    PredictedState ps = agent.state_at(agent.most_likely(), k);
    if (ps.s >= s) continue;
    if (!best || ps.s > best->s) best = NeighborAgent{&agent, ps.s, ps.v};
  }
  return best;
}

namespace {

// Builds a keep-lane expansion from a longitudinal evaluator.
Expansion longitudinal_expansion(const VehicleState& state, const LanePath& lane,
                                 const PlannerConfig& cfg,
                                 const std::function<LonStep::Eval(double)>& eval,
                                 double a_child) {
  double tr = theta_rel(state, lane);
  int n = substep_count(cfg);
  Expansion exp;
  exp.samples.reserve(n + 1);
  for (int m = 0; m <= n; ++m) {
    double t = std::min(cfg.dt, m * cfg.lane_change_substep);
    LonStep::Eval e = eval(t);
    CartesianPose p = offset_pose_extrapolated(lane, state.s + e.ds, state.d, tr);
    exp.samples.push_back({t, p.x, p.y, p.theta, p.kappa, e.v, e.a});
  }
  LonStep::Eval end = eval(cfg.dt);
  VehicleState child = state;
  child.s = state.s + end.ds;
  child.v = std::max(0.0, end.v);
  child.a = a_child;
  child.k = state.k + 1;
  CartesianPose pe = offset_pose_extrapolated(lane, child.s, state.d, tr);
  child.theta = pe.theta;
  child.kappa = pe.kappa;
  exp.state = child;
  return exp;
}

}  // namespace

std::optional<Expansion> expand_accel_target(const VehicleState& state, double a_target,
                                             const LanePath& lane, const PlannerConfig& cfg) {
  if (std::abs(a_target - state.a) > cfg.max_accel_step + kEps) return std::nullopt;
  LonStep lon(state.v, state.a, a_target, cfg.dt);
  double a_child = lon.at(cfg.dt).a;  // a_target, or 0 after a stop
  return longitudinal_expansion(
      state, lane, cfg, [&lon](double t) { return lon.at(t); }, a_child);
}

std::optional<Expansion> expand_velocity_target(const VehicleState& state, double v_target,
                                                const LanePath& lane, const PlannerConfig& cfg) {
  if (std::abs(state.a) > cfg.max_accel_step + kEps) return std::nullopt;
  if (std::abs(state.a) > cfg.profile_accel_max + 1e-9) return std::nullopt;
  JerkProfile profile;
  try {
    profile = time_optimal_velocity_profile(state.v, state.a, v_target, cfg.profile_jerk_max,
                                            cfg.profile_accel_max);
  } catch (const InvalidInput&) {
    return std::nullopt;
  }
  if (profile.total_time > cfg.dt + 1e-9) return std::nullopt;

  auto eval = [&](double t) -> LonStep::Eval {
    ProfileState ps = profile_state_at(profile, state.v, state.a, t);
    return {ps.s, ps.v, ps.a};
  };
  Expansion exp = longitudinal_expansion(state, lane, cfg, eval, 0.0);
  exp.state.v = v_target;  // exact by construction of the profile
  exp.state.a = 0.0;
  return exp;
}

std::optional<Expansion> expand_lane_change(const VehicleState& state, const LanePath& current,
                                            const LanePath& target, double a_target,
                                            const PlannerConfig& cfg) {
  if (std::abs(a_target - state.a) > cfg.max_accel_step + kEps) return std::nullopt;

  LonStep lon(state.v, state.a, a_target, cfg.dt);
  CartesianPose start =
      offset_pose_extrapolated(current, state.s, state.d, theta_rel(state, current));
  double x = start.x;
  double y = start.y;
  double theta = state.theta;  // keep the stored global heading, unwrapped below
  double kap = state.kappa;

  int n = substep_count(cfg);
  double h = cfg.dt / n;
  Expansion exp;
  exp.samples.reserve(n + 1);
  exp.samples.push_back({0.0, x, y, wrap_angle(theta), kap, state.v, state.a});

  for (int m = 1; m <= n; ++m) {
    double t0 = (m - 1) * h;
    double t1 = m * h;
    LonStep::Eval e0 = lon.at(t0);
    LonStep::Eval e1 = lon.at(t1);

    double kcmd;
    try {
      CartesianPose pose{x, y, wrap_angle(theta), kap};
      FrenetPose foot =
          cartesian_to_frenet(target, pose, std::numeric_limits<double>::infinity());
      double remaining = target.length() - foot.s;
      if (remaining <= 0.5) return std::nullopt;
      double lookahead =
          std::min(std::max(cfg.pursuit_min_lookahead, cfg.pursuit_time_gap * e0.v), remaining);
      kcmd = pure_pursuit_curvature(pose, target, lookahead, cfg.kappa_max);
    } catch (const OutOfDomain&) {
      return std::nullopt;
    }

    double dk = std::clamp(kcmd - kap, -cfg.kappa_dot_max * h, cfg.kappa_dot_max * h);
    kap = std::clamp(kap + dk, -cfg.kappa_max, cfg.kappa_max);

    double ds = e1.ds - e0.ds;
    if (std::abs(kap) > 1e-9) {
      x += (std::sin(theta + kap * ds) - std::sin(theta)) / kap;
      y += (std::cos(theta) - std::cos(theta + kap * ds)) / kap;
      theta += kap * ds;
    } else {
      x += std::cos(theta) * ds;
      y += std::sin(theta) * ds;
    }
    exp.samples.push_back({t1, x, y, wrap_angle(theta), kap, e1.v, e1.a});
  }

  FrenetPose end;
  try {
    end = cartesian_to_frenet(target, {x, y, wrap_angle(theta), kap}, cfg.corridor_half_width);
  } catch (const std::out_of_range&) {
    return std::nullopt;
  }

  LonStep::Eval efin = lon.at(cfg.dt);
  VehicleState child;
  child.lane = target.id;
  child.s = end.s;
  child.d = end.d;
  child.theta = wrap_angle(theta);
  child.kappa = kap;
  child.v = std::max(0.0, efin.v);
  child.a = efin.a;
  child.k = state.k + 1;
  exp.state = child;
  return exp;
}

FeasibilityViolation check_feasibility(const std::vector<TrajectorySample>& samples,
                                       const WorldView& world, const PlannerConfig& cfg,
                                       double step_base,
                                       const std::string& plan_lane) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& sp = samples[i];
    if (std::abs(sp.kappa) > cfg.kappa_max + kFeasTol) return FeasibilityViolation::curvature;
    if (i > 0) {
      double dtau = sp.t - samples[i - 1].t;
      if (dtau > 0.0 &&
          std::abs(sp.kappa - samples[i - 1].kappa) / dtau > cfg.kappa_dot_max + kFeasTol) {
        return FeasibilityViolation::curvature_rate;
      }
    }
    if (sp.v < -kFeasTol) return FeasibilityViolation::negative_speed;
    double a_lat = sp.v * sp.v * sp.kappa;
    if (std::hypot(sp.a, a_lat) > cfg.a_abs_max + kFeasTol) {
      return FeasibilityViolation::accel_limit;
    }
  }

  if (world.predictions && world.road) {
    // Lanes reachable from the plan's lane by neighbor hops run alongside it,
    // and a conflict there only shrinks as either party brakes, so the most
    // likely forecast is screen enough.  A lane outside that closure crosses
    // the plan's path instead; a forecast error there can turn a threaded gap
    // into a trap no brake escapes, so every hypothesis has to stay clear.
    std::vector<std::string> closure;
    if (!plan_lane.empty()) {
      closure.push_back(plan_lane);
      std::size_t frontier = 0;
      for (int hop = 0; hop < 2; ++hop) {
        std::size_t end = closure.size();
        for (std::size_t i = frontier; i < end; ++i) {
          const LanePath* lp = world.road->find(closure[i]);
          if (!lp) continue;
          for (const auto* nb : {&lp->left_neighbor, &lp->right_neighbor}) {
            if (nb->has_value() &&
                std::find(closure.begin(), closure.end(), **nb) == closure.end()) {
              closure.push_back(**nb);
            }
          }
        }
        frontier = end;
      }
    }
    for (const auto& sp : samples) {
      OrientedBox ego{sp.x, sp.y, sp.theta, cfg.ego_length + 2.0 * cfg.safety_margin,
                      cfg.ego_width + 2.0 * cfg.safety_margin};
      double step_time = step_base + sp.t / cfg.dt;
      for (const auto& agent : world.predictions->agents) {
        if (agent.hypotheses.empty()) continue;
        const LanePath* lane = world.road->find(agent.lane);
        if (!lane) continue;
        bool crossing = !closure.empty() &&
                        std::find(closure.begin(), closure.end(), agent.lane) ==
                            closure.end();
        std::size_t ml = agent.most_likely();
        for (std::size_t hi = 0; hi < agent.hypotheses.size(); ++hi) {
          if (!crossing && hi != ml) continue;
          PredictedState ps = agent.interpolate(hi, step_time);
          CartesianPose pose = lane_pose_extrapolated(*lane, ps.s);
          OrientedBox box{pose.x, pose.y, pose.theta, agent.length, agent.width};
          if (boxes_intersect(ego, box)) return FeasibilityViolation::collision;
        }
      }
    }
  }
  return FeasibilityViolation::none;
}

std::vector<Action> select_actions(const VehicleState& state, const WorldView& world,
                                   const PlannerConfig& cfg, BranchingMode mode) {
  const LanePath& lane = world.road->at(state.lane);
  bool aligned = lane_aligned(state, lane, cfg);
  int k1 = state.k + 1;

  // Car-following context: nearest predicted leader at the next step within
  // the interaction range.
  std::optional<double> a_idm;
  bool car_following = false;
  if (mode != BranchingMode::baseline && world.predictions) {
    auto lead = front_agent(*world.predictions, state.lane, state.s, k1);
    if (lead) {
      double gap = lead->s - state.s - 0.5 * (lead->agent->length + cfg.ego_length);
      double range = cfg.idm.min_gap +
                     state.v * cfg.idm.time_headway * cfg.following_range_factor;
      if (gap <= range) {
        car_following = true;
        a_idm = gap > 0.0
                    ? idm_acceleration(state.v, IdmLeader{gap, lead->v}, cfg.ego_idm())
                    : -cfg.idm.b_hard;
      }
    }
  }

  auto within_step = [&](double a_t) {
    return std::abs(a_t - state.a) <= cfg.max_accel_step + kEps;
  };

  std::vector<double> accels;
  for (double a_t : cfg.accel_set) {
    if (!within_step(a_t)) continue;
    if (mode == BranchingMode::proposed && car_following && a_idm &&
        std::abs(a_t - *a_idm) <= cfg.idm_gate_margin) {
      continue;  // too close to the model output to be worth a branch
    }
    accels.push_back(a_t);
  }
  if (car_following && a_idm && within_step(*a_idm)) {
    bool dup = std::any_of(accels.begin(), accels.end(),
                           [&](double a_t) { return std::abs(a_t - *a_idm) <= kEps; });
    if (!dup) accels.push_back(*a_idm);
  }
  std::sort(accels.begin(), accels.end());

  std::vector<Action> out;
  for (double a_t : accels) {
    out.push_back({Action::Lon::accel_target, a_t, LateralAction::keep});
  }

  // Velocity targets: stop and desired speed, when the transfer fits the step.
  if (mode != BranchingMode::baseline && aligned &&
      std::abs(state.a) <= cfg.max_accel_step + kEps &&
      std::abs(state.a) <= cfg.profile_accel_max + 1e-9) {
    for (double v_t : {0.0, cfg.v_desired}) {
      JerkProfile profile;
      try {
        profile = time_optimal_velocity_profile(state.v, state.a, v_t, cfg.profile_jerk_max,
                                                cfg.profile_accel_max);
      } catch (const InvalidInput&) {
        continue;
      }
      if (profile.total_time <= cfg.dt + 1e-9) {
        out.push_back({Action::Lon::velocity_target, v_t, LateralAction::keep});
      }
    }
  }

  // Lane changes: gap-existence precondition in passive mode, MOBIL gate on
  // top of it in proposed mode.
  if (mode != BranchingMode::baseline && aligned && world.predictions) {
    for (LateralAction side : {LateralAction::left, LateralAction::right}) {
      const auto& nb =
          side == LateralAction::left ? lane.left_neighbor : lane.right_neighbor;
      if (!nb) continue;
      const LanePath* target = world.road->find(*nb);
      if (!target) continue;

      double s_t;
      try {
        CartesianPose pose =
            offset_pose_extrapolated(lane, state.s, state.d, theta_rel(state, lane));
        pose.theta = state.theta;
        s_t = cartesian_to_frenet(*target, pose, cfg.corridor_half_width).s;
      } catch (const std::out_of_range&) {
        continue;
      }

      auto net_front = [&](const NeighborAgent& nbv) {
        return nbv.s - (nbv.agent->lane == state.lane ? state.s : s_t) -
               0.5 * (nbv.agent->length + cfg.ego_length);
      };
      auto net_rear = [&](const NeighborAgent& nbv) {
        return (nbv.agent->lane == state.lane ? state.s : s_t) - nbv.s -
               0.5 * (nbv.agent->length + cfg.ego_length);
      };

      auto t_lead = front_agent(*world.predictions, target->id, s_t, k1);
      auto t_follow = rear_agent(*world.predictions, target->id, s_t, k1);
      bool gap_ok = (!t_lead || net_front(*t_lead) > 0.0) &&
                    (!t_follow || net_rear(*t_follow) > 0.0);
      if (!gap_ok) continue;

      if (mode == BranchingMode::proposed) {
        auto c_lead = front_agent(*world.predictions, state.lane, state.s, k1);
        auto c_follow = rear_agent(*world.predictions, state.lane, state.s, k1);
        MobilContext cur;
        MobilContext tgt;
        auto clamp_gap = [](double g) { return std::max(g, 0.01); };
        if (c_lead) cur.leader = MobilVehicle{clamp_gap(net_front(*c_lead)), c_lead->v};
        if (c_follow) cur.follower = MobilVehicle{clamp_gap(net_rear(*c_follow)), c_follow->v};
        if (t_lead) tgt.leader = MobilVehicle{net_front(*t_lead), t_lead->v};
        if (t_follow) tgt.follower = MobilVehicle{net_rear(*t_follow), t_follow->v};
        if (mobil_decision(cur, tgt, state.v, cfg.ego_length, cfg.ego_idm(), cfg.mobil) !=
            LaneChangeDecision::change) {
          continue;
        }
      }

      for (double a_t : accels) {
        out.push_back({Action::Lon::accel_target, a_t, side});
      }
    }
  }

  return out;
}

std::optional<Expansion> expand_action(const VehicleState& state, const Action& action,
                                       const WorldView& world, const PlannerConfig& cfg) {
  const LanePath& lane = world.road->at(state.lane);
  std::optional<Expansion> exp;
  if (action.lat == LateralAction::keep) {
    if (action.lon == Action::Lon::accel_target) {
      if (lane_aligned(state, lane, cfg)) {
        exp = expand_accel_target(state, action.value, lane, cfg);
      } else {
        // Mid-change: keep converging onto the current lane's centerline.
        exp = expand_lane_change(state, lane, lane, action.value, cfg);
      }
    } else {
      exp = expand_velocity_target(state, action.value, lane, cfg);
    }
  } else {
    const auto& nb =
        action.lat == LateralAction::left ? lane.left_neighbor : lane.right_neighbor;
    if (!nb) return std::nullopt;
    const LanePath* target = world.road->find(*nb);
    if (!target) return std::nullopt;
    exp = expand_lane_change(state, lane, *target, action.value, cfg);
  }
  if (!exp) return std::nullopt;
  if (check_feasibility(exp->samples, world, cfg, state.k, state.lane) !=
      FeasibilityViolation::none) {
    return std::nullopt;
  }
  return exp;
}

}  // namespace gbplan
