#include "gbplan/traffic_sim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gbplan/driver_models.hpp"
#include "gbplan/errors.hpp"

namespace gbplan {

namespace {

// Position of a vehicle that holds accel `a` from (s, v), with the speed
// clamped at zero once it stops.
double coast_position(double s, double v, double a, double t) {
  if (a < 0.0 && v + a * t < 0.0) {
    double t_stop = v / -a;
    return s + 0.5 * v * t_stop;
  }
  return s + v * t + 0.5 * a * t * t;
}

AgentState advance_agent(const AgentState& st, double a, double dt) {
  AgentState next;
  next.a = a;
  if (a < 0.0 && st.v + a * dt < 0.0) {
    next.v = 0.0;
    next.s = coast_position(st.s, st.v, a, dt);
  } else {
    next.v = st.v + a * dt;
    next.s = st.s + st.v * dt + 0.5 * a * dt * dt;
  }
  return next;
}

// True when a comfortable brake step (accel ramped to `a_comfort_target`
// over one cycle) followed by an immediate hard brake stays clear of every
// agent's most likely motion for the whole horizon.  Leaders in the ego's
// lane are projected longitudinally with the planning margin; agents on any
// other lane -- crossing or merging paths included -- are swept footprint
// against footprint with the same box inflation the search itself prunes
// with, the braking arc following the ego's lane at its current offset.
// The sweep keeps running after the ego stands still: a stopped vehicle
// inside someone else's path still has to force the hard tier.
bool comfort_brake_clears(const VehicleState& ego, double a_comfort_target,
                          const RoadMap& road, const PredictionSet& predictions,
                          const PlannerConfig& cfg) {
  struct SameLane {
    const AgentPrediction* ag;
    std::size_t ml;
    double half;
  };
  struct OtherLane {
    const AgentPrediction* ag;
    std::size_t ml;
    const LanePath* lane;
  };
  std::vector<SameLane> ahead;
  std::vector<OtherLane> others;
  for (const AgentPrediction& ag : predictions.agents) {
    if (ag.hypotheses.empty()) continue;
    if (ag.lane == ego.lane) {
      if (ag.s0 < ego.s) continue;
      ahead.push_back(
          {&ag, ag.most_likely(), 0.5 * (ag.length + cfg.ego_length)});
    } else if (const LanePath* lane = road.find(ag.lane)) {
      others.push_back({&ag, ag.most_likely(), lane});
    }
  }
  if (ahead.empty() && others.empty()) return true;

  const LanePath& ego_lane = road.at(ego.lane);
  const double h = 0.02;
  const double window = cfg.horizon_steps * cfg.dt;
  const double slope = (a_comfort_target - ego.a) / cfg.dt;
  double s = ego.s;
  double v = ego.v;
  for (double t = 0.0; t < window; t += h) {
    double a_now = t < cfg.dt ? ego.a + slope * t : -cfg.idm.b_hard;
    double v_next = std::max(0.0, v + a_now * h);
    s += 0.5 * (v + v_next) * h;
    v = v_next;
    for (const SameLane& c : ahead) {
      double front = c.ag->interpolate(c.ml, (t + h) / cfg.dt).s;
      if (front - s - c.half <= cfg.safety_margin) return false;
    }
    if (!others.empty()) {
      CartesianPose ep = lane_pose_extrapolated(ego_lane, s);
      OrientedBox ego_box{ep.x - ego.d * std::sin(ep.theta),
                          ep.y + ego.d * std::cos(ep.theta), ep.theta,
                          cfg.ego_length + 2.0 * cfg.safety_margin,
                          cfg.ego_width + 2.0 * cfg.safety_margin};
      for (const OtherLane& c : others) {
        PredictedState ps = c.ag->interpolate(c.ml, (t + h) / cfg.dt);
        CartesianPose pose = lane_pose_extrapolated(*c.lane, ps.s);
        OrientedBox box{pose.x, pose.y, pose.theta, c.ag->length, c.ag->width};
        if (boxes_intersect(ego_box, box)) return false;
      }
    }
  }
  return true;
}

}  // namespace

double uniform_draw(std::mt19937_64& rng, double lo, double hi) {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

PredictionSet predict_agents(const std::vector<AgentSpec>& specs,
                             const std::vector<AgentState>& states,
                             int horizon_steps, double dt) {
  if (specs.size() != states.size())
    throw InvalidInput("predict_agents: spec/state size mismatch");
  PredictionSet out;
  out.agents.reserve(specs.size());
  const double accels[3] = {0.0, -0.5, 0.5};
  const double probs[3] = {0.5, 0.25, 0.25};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    AgentPrediction ap;
    ap.agent_id = specs[i].id;
    ap.lane = specs[i].lane;
    ap.s0 = states[i].s;
    ap.v0 = states[i].v;
    ap.length = specs[i].length;
    ap.width = specs[i].width;
    for (int m = 0; m < 3; ++m) {
      PredictionHypothesis hyp;
      hyp.probability = probs[m];
      hyp.states.reserve(static_cast<std::size_t>(horizon_steps));
      double s = states[i].s, v = states[i].v;
      for (int k = 0; k < horizon_steps; ++k) {
        double v_next = std::max(0.0, v + accels[m] * dt);
        s += 0.5 * (v + v_next) * dt;
        v = v_next;
        hyp.states.push_back(PredictedState{s, v});
      }
      ap.hypotheses.push_back(std::move(hyp));
    }
    out.agents.push_back(std::move(ap));
  }
  return out;
}

SimResult run_closed_loop(const RoadMap& road, const VehicleState& ego0,
                          const std::vector<AgentSpec>& agents,
                          const PlannerConfig& cfg, const CostWeights& weights,
                          const SimConfig& sim) {
  cfg.validate();
  weights.validate();
  if (sim.steps < 1) throw InvalidInput("run_closed_loop: steps must be >= 1");

  SimResult out;
  std::mt19937_64 rng(sim.seed);

  VehicleState ego = ego0;
  ego.k = 0;
  std::vector<AgentState> states(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i)
    states[i] = AgentState{agents[i].s, agents[i].v, 0.0};

  for (int cycle = 0; cycle < sim.steps; ++cycle) {
    PredictionSet predictions =
        predict_agents(agents, states, cfg.horizon_steps, cfg.dt);
    WorldView world{&road, &predictions};
    SearchResult plan_result =
        plan(ego, world, cfg, weights, sim.mode, sim.heuristic);

    CycleRecord rec;
    rec.cycle = cycle;
    rec.status = plan_result.status;
    rec.expanded = plan_result.expanded;
    rec.generated = plan_result.generated;
    rec.ego = ego;
    out.total_expanded += plan_result.expanded;
    out.total_generated += plan_result.generated;

    RefinedTrajectory refined;
    VehicleState next_ego;
    if (plan_result.status == SearchStatus::found) {
      rec.plan_cost = plan_result.total_cost;
      std::vector<PlanStep> first(plan_result.steps.begin(),
                                  plan_result.steps.begin() + 1);
      refined = refine(ego, first, road, cfg, sim.dt_fine);
      next_ego = first[0].state;
    } else {
      // No admissible branch: bleed speed with a steady brake, rate-limited
      // so the executed motion stays within the same accel-step envelope.
      // When even that, continued as a hard brake, would no longer clear the
      // leader, slam straight to the hard-braking floor instead.
      rec.fallback = true;
      ++out.fallback_count;
      const LanePath& ego_lane = road.at(ego.lane);
      double a_t = std::clamp(-2.0, ego.a - cfg.max_accel_step,
                              ego.a + cfg.max_accel_step);
      auto expansion = expand_accel_target(ego, a_t, ego_lane, cfg);
      VehicleState from = ego;
      if (!expansion ||
          !comfort_brake_clears(ego, a_t, road, predictions, cfg)) {
        rec.emergency = true;
        a_t = -cfg.idm.b_hard;
        from.a = a_t;  // brake pedal slam: the accel jump is intentional
        expansion = expand_accel_target(from, a_t, ego_lane, cfg);
      }
      if (!expansion)
        throw InvalidInput("run_closed_loop: braking fallback rejected");
      PlanStep step;
      step.action = Action{Action::Lon::accel_target, a_t,
                           LateralAction::keep};
      step.state = expansion->state;
      refined = refine(from, {step}, road, cfg, sim.dt_fine);
      next_ego = expansion->state;
    }
    next_ego.k = 0;
    out.cycles.push_back(rec);

    // Agents pick this cycle's accel from the start-of-cycle snapshot: one
    // uniform draw per random agent in spec order, or a car-following
    // response to the nearest vehicle ahead (the ego included).
    std::vector<double> agent_accel(agents.size(), 0.0);
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const AgentSpec& spec = agents[i];
      if (spec.behavior == AgentBehavior::random_accel) {
        agent_accel[i] = uniform_draw(rng, spec.accel_lo, spec.accel_hi);
      } else {
        std::optional<IdmLeader> leader;
        double best_s = 0.0;
        bool have = false;
        if (ego.lane == spec.lane && ego.s >= states[i].s) {
          best_s = ego.s;
          leader = IdmLeader{
              ego.s - states[i].s - 0.5 * (cfg.ego_length + spec.length),
              ego.v};
          have = true;
        }
        for (std::size_t jx = 0; jx < agents.size(); ++jx) {
          if (jx == i || agents[jx].lane != spec.lane) continue;
          if (states[jx].s < states[i].s) continue;
          if (have && states[jx].s >= best_s) continue;
          best_s = states[jx].s;
          leader = IdmLeader{states[jx].s - states[i].s -
                                 0.5 * (agents[jx].length + spec.length),
                             states[jx].v};
          have = true;
        }
        if (leader && leader->gap <= 0.0) {
          agent_accel[i] = -spec.idm.b_hard;
        } else {
          agent_accel[i] = idm_acceleration(states[i].v, leader, spec.idm);
        }
      }
    }

    // Overlap check along the executed fine trajectory against the agents'
    // in-cycle motion.
    bool hit = false;
    if (!refined.steps.empty()) {
      for (const TrajectoryPoint& p : refined.steps[0].points) {
        OrientedBox ego_box{p.x, p.y, p.theta, cfg.ego_length, cfg.ego_width};
        for (std::size_t i = 0; i < agents.size() && !hit; ++i) {
          double s_a =
              coast_position(states[i].s, states[i].v, agent_accel[i], p.t);
          CartesianPose ap =
              lane_pose_extrapolated(road.at(agents[i].lane), s_a);
          OrientedBox agent_box{ap.x, ap.y, ap.theta, agents[i].length,
                                agents[i].width};
          if (boxes_intersect(ego_box, agent_box)) hit = true;
        }
        if (hit) break;
      }
      std::size_t begin = out.driven.empty() ? 0 : 1;
      for (std::size_t i = begin; i < refined.steps[0].points.size(); ++i) {
        TrajectoryPoint p = refined.steps[0].points[i];
        p.t += cycle * cfg.dt;
        out.driven.push_back(p);
      }
    }

    for (std::size_t i = 0; i < agents.size(); ++i)
      states[i] = advance_agent(states[i], agent_accel[i], cfg.dt);
    ego = next_ego;

    if (hit) {
      out.collision = true;
      out.collision_cycle = cycle;
      break;
    }
  }

  out.final_ego = ego;
  out.final_agents = states;
  return out;
}

}  // namespace gbplan
