#include "gbplan/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gbplan/driver_models.hpp"
#include "gbplan/errors.hpp"
#include "gbplan/predictions.hpp"

namespace gbplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double x) { return x * x; }

// Penalty for sitting closer to a leader than the desired headway.  Zero once
// the gap reaches min_gap + v * tau; grows quadratically as the gap shrinks
// and keeps growing past overlap (gap may be negative).
double front_gap_term(double gap, double v_ego, double min_gap, double tau) {
  double margin = min_gap + v_ego * tau;
  return sq(std::max(0.0, 1.0 - gap / margin));
}

// Deceleration a follower at v_rear needs, per its car-following law, to deal
// with the ego merging `gap` ahead of it at v_ego.  Gap <= 0 pins the demand
// at the hard-braking limit.
double required_braking(double v_rear, double gap, double v_ego,
                        const IdmParams& idm) {
  if (gap <= 0.0) return idm.b_hard;
  IdmParams p = idm;
  p.v_desired = std::max(v_rear, 0.1);  // follower content at its own speed
  double a = idm_acceleration(v_rear, IdmLeader{gap, v_ego}, p);
  return std::max(0.0, -a);
}

// Minimum of required_braking over ego speeds in [v_ego_lo, v_ego_hi] for a
// fixed follower state and the largest gap it could have.  The interaction
// term is quadratic in the desired-gap expression, which is linear in the ego
// speed, so the minimiser is at whichever end brings it closest to zero.
double required_braking_floor(double v_rear, double gap, double v_ego_lo,
                              double v_ego_hi, const IdmParams& idm) {
  if (gap <= 0.0) return idm.b_hard;
  double coef = v_rear / (2.0 * std::sqrt(idm.a_max * idm.b_comf));
  double base = idm.min_gap + v_rear * idm.time_headway + coef * v_rear;
  double star_hi = base - coef * v_ego_lo;  // desired gap falls as ego speeds up
  double star_lo = base - coef * v_ego_hi;
  double star_abs;
  if (star_lo <= 0.0 && star_hi >= 0.0)
    star_abs = 0.0;
  else
    star_abs = std::min(std::abs(star_lo), std::abs(star_hi));
  double v_des = std::max(v_rear, 0.1);
  double slack = 1.0 - std::pow(v_rear / v_des, idm.delta);
  double b = idm.a_max * (sq(star_abs / gap) - slack);
  return std::clamp(b, 0.0, idm.b_hard);
}

// Largest velocity gain any jerk-limited accel profile can realize within
// `horizon` seconds when it starts at accel a0 and must end at zero accel.
double profile_gain_limit(double a0, double jerk, double a_lim,
                          double horizon) {
  double t_peak = (jerk * horizon - a0) / (2.0 * jerk);
  if (t_peak <= 0.0) return 0.0;
  double peak = a0 + jerk * t_peak;
  if (peak <= 0.0) return 0.0;
  if (peak <= a_lim)
    return a0 * t_peak + 0.5 * jerk * sq(t_peak) + sq(peak) / (2.0 * jerk);
  double t1 = (a_lim - a0) / jerk;
  double t3 = a_lim / jerk;
  double hold = std::max(0.0, horizon - t1 - t3);
  return 0.5 * (a0 + a_lim) * t1 + a_lim * hold + sq(a_lim) / (2.0 * jerk);
}

}  // namespace

void CostWeights::validate() const {
  if (w_front < 0.0 || w_cut_in < 0.0 || w_velocity < 0.0 || w_accel < 0.0 ||
      w_accel_rate < 0.0 || w_lane_change < 0.0)
    throw InvalidInput("cost weights must be non-negative");
  if (tau_front <= 0.0) throw InvalidInput("tau_front must be positive");
}

CostBreakdown edge_cost(const VehicleState& parent, const VehicleState& child,
                        const Action& action, const WorldView& world,
                        const CostWeights& weights, const PlannerConfig& cfg) {
  CostBreakdown c;
  c.j_velocity = sq((child.v - cfg.v_desired) / cfg.v_desired);
  c.j_accel = sq(child.a);
  c.j_accel_rate = sq((child.a - parent.a) / cfg.dt);
  c.j_lane_change = action.lat == LateralAction::keep ? 0.0 : 1.0;

  if (world.predictions != nullptr) {
    auto front = front_agent(*world.predictions, child.lane, child.s, child.k);
    if (front) {
      const AgentPrediction& ag = *front->agent;
      double half = 0.5 * (ag.length + cfg.ego_length);
      for (std::size_t m = 0; m < ag.hypotheses.size(); ++m) {
        PredictedState ps = ag.state_at(m, child.k);
        double gap = ps.s - child.s - half;
        c.j_front += ag.hypotheses[m].probability *
                     front_gap_term(gap, child.v, cfg.idm.min_gap,
                                    weights.tau_front);
      }
    }
    auto rear = rear_agent(*world.predictions, child.lane, child.s, child.k);
    if (rear) {
      const AgentPrediction& ag = *rear->agent;
      double half = 0.5 * (ag.length + cfg.ego_length);
      for (std::size_t m = 0; m < ag.hypotheses.size(); ++m) {
        PredictedState ps = ag.state_at(m, child.k);
        double gap = child.s - ps.s - half;
        double b_req = required_braking(ps.v, gap, child.v, cfg.idm);
        c.j_cut_in +=
            ag.hypotheses[m].probability * sq(b_req / cfg.mobil.b_safe);
      }
    }
  }

  c.total = weights.w_front * c.j_front + weights.w_cut_in * c.j_cut_in +
            weights.w_velocity * c.j_velocity + weights.w_accel * c.j_accel +
            weights.w_accel_rate * c.j_accel_rate +
            weights.w_lane_change * c.j_lane_change;
  return c;
}

HeuristicBound full_heuristic(const VehicleState& state, const WorldView& world,
                              const CostWeights& weights,
                              const PlannerConfig& cfg, BranchingMode mode) {
  HeuristicBound out;
  int n = cfg.horizon_steps - state.k;
  if (n <= 0) return out;
  out.per_step.resize(static_cast<std::size_t>(n));

  const double dt = cfg.dt;
  const double jm = cfg.profile_jerk_max;
  const double a_lim = cfg.profile_accel_max;
  const double da = cfg.max_accel_step;
  // Besides the fixed targets, car-following contexts append the IDM output
  // as an extra action; it is clamped to [-b_hard, a_max], so both ends of
  // the reachable-acceleration band take the wider of the two sources.
  double a_top =
      *std::max_element(cfg.accel_set.begin(), cfg.accel_set.end());
  if (mode != BranchingMode::baseline) a_top = std::max(a_top, cfg.idm.a_max);
  const double a_floor = std::min(
      *std::min_element(cfg.accel_set.begin(), cfg.accel_set.end()),
      -cfg.idm.b_hard);
  const double vt_gate = std::min(da, a_lim);

  // Reachable envelopes for accel, velocity, and position over the remaining
  // steps.  Accel ramps are limited per step; velocity growth per step is the
  // best of the accel-ramp trapezoid and a velocity-target profile (which can
  // front-load accel within the step); a_child = 0 is always reachable via
  // the stop clamp, so the accel band always includes zero.
  std::vector<double> a_hi(n + 1), a_lo(n + 1), v_hi(n + 1), v_lo(n + 1),
      s_hi(n + 1), s_lo(n + 1);
  a_hi[0] = a_lo[0] = state.a;
  v_hi[0] = v_lo[0] = state.v;
  s_hi[0] = s_lo[0] = state.s;
  for (int i = 1; i <= n; ++i) {
    a_hi[i] = std::min(a_top, std::max(0.0, a_hi[i - 1] + da));
    a_lo[i] = std::max(a_floor, std::min(0.0, a_lo[i - 1] - da));
    double up = 0.5 * (a_hi[i - 1] + a_hi[i]) * dt;
    double down = 0.5 * (a_lo[i - 1] + a_lo[i]) * dt;
    double within_hi = std::max(a_hi[i - 1], a_hi[i]);
    double within_lo = std::min(a_lo[i - 1], a_lo[i]);
    bool vt_open = a_lo[i - 1] <= vt_gate && a_hi[i - 1] >= -vt_gate;
    if (vt_open) {
      double up0 = std::clamp(a_hi[i - 1], -vt_gate, vt_gate);
      double dn0 = std::clamp(-a_lo[i - 1], -vt_gate, vt_gate);
      up = std::max(up, profile_gain_limit(up0, jm, a_lim, dt));
      down = std::min(down, -profile_gain_limit(dn0, jm, a_lim, dt));
      within_hi = std::max(within_hi, a_lim);
      within_lo = std::min(within_lo, -a_lim);
    }
    // Speeds never leave [0, inf): a downward ramp that would cross zero
    // stops and holds instead, so both envelope edges clamp at zero.
    v_hi[i] = std::max(0.0, v_hi[i - 1] + up);
    v_lo[i] = std::max(0.0, v_lo[i - 1] + down);
    s_hi[i] = s_hi[i - 1] + (v_hi[i - 1] + std::max(0.0, within_hi) * dt) * dt;
    s_lo[i] =
        s_lo[i - 1] +
        std::max(0.0, v_lo[i - 1] + std::min(0.0, within_lo) * dt) * dt;
  }

  for (int i = 1; i <= n; ++i) {
    PerStepBound& b = out.per_step[static_cast<std::size_t>(i - 1)];
    if (v_hi[i] < cfg.v_desired)
      b.j_velocity = sq((v_hi[i] - cfg.v_desired) / cfg.v_desired);
    else if (v_lo[i] > cfg.v_desired)
      b.j_velocity = sq((v_lo[i] - cfg.v_desired) / cfg.v_desired);
  }

  // The interaction terms assume the ego stays in its current lane so
  // positions remain comparable along one centerline; that branch of the
  // cost-to-go is exact for a centerline-tracking state because keep-lane
  // expansions advance s by the pure longitudinal integral.  A state off the
  // centerline is still converging from a lane change and moves on a curve,
  // which voids the position envelopes, so only the velocity terms are
  // claimed there.
  const LanePath* lane = world.road ? world.road->find(state.lane) : nullptr;
  bool has_left = lane && lane->left_neighbor &&
                  world.road->find(*lane->left_neighbor) != nullptr;
  bool has_right = lane && lane->right_neighbor &&
                   world.road->find(*lane->right_neighbor) != nullptr;
  bool anchored = lane != nullptr && world.predictions != nullptr &&
                  lane_aligned(state, *lane, cfg);
  // A branch that changes lanes sidesteps every in-lane interaction term but
  // pays the lane-change penalty at least once, so when such a branch exists
  // the interaction contribution is capped at that penalty.
  bool escape = mode != BranchingMode::baseline && (has_left || has_right);

  if (anchored) {
    for (int i = 1; i <= n; ++i) {
      PerStepBound& b = out.per_step[static_cast<std::size_t>(i - 1)];
      int k_abs = state.k + i;
      bool any_agent = false;
      bool no_front_possible = true;
      bool no_rear_possible = true;
      double best_front = kInf;
      double best_rear = kInf;
      for (const AgentPrediction& ag : world.predictions->agents) {
        if (ag.lane != state.lane) continue;
        any_agent = true;
        double half = 0.5 * (ag.length + cfg.ego_length);
        double hyp_min = kInf, hyp_max = -kInf;
        double front_sum = 0.0, rear_sum = 0.0;
        for (std::size_t m = 0; m < ag.hypotheses.size(); ++m) {
          PredictedState ps = ag.state_at(m, k_abs);
          double p = ag.hypotheses[m].probability;
          hyp_min = std::min(hyp_min, ps.s);
          hyp_max = std::max(hyp_max, ps.s);
          double front_gap = ps.s - s_lo[i] - half;
          front_sum +=
              p * std::min(front_gap_term(front_gap, v_lo[i], cfg.idm.min_gap,
                                          weights.tau_front),
                           front_gap_term(front_gap, v_hi[i], cfg.idm.min_gap,
                                          weights.tau_front));
          double rear_gap = s_hi[i] - ps.s - half;
          rear_sum += p * sq(required_braking_floor(ps.v, rear_gap, v_lo[i],
                                                    v_hi[i], cfg.idm) /
                             cfg.mobil.b_safe);
        }
        if (hyp_max >= s_lo[i]) best_front = std::min(best_front, front_sum);
        if (hyp_min < s_hi[i]) best_rear = std::min(best_rear, rear_sum);
        if (!(hyp_min < s_hi[i])) no_front_possible = false;
        if (!(hyp_max >= s_lo[i])) no_rear_possible = false;
      }
      if (any_agent && !no_front_possible && best_front < kInf)
        b.j_front = best_front;
      if (any_agent && !no_rear_possible && best_rear < kInf)
        b.j_cut_in = best_rear;
    }

    // Unavoidable braking: if coasting at the current speed would close the
    // gap to the leader's most likely motion by some step, every feasible
    // branch must shed speed by then, and the cheapest way to spread that
    // shed over the steps bounds the accel and accel-rate terms from below.
    auto front = front_agent(*world.predictions, state.lane, state.s, state.k);
    if (front && state.v > 0.0) {
      const AgentPrediction& ag = *front->agent;
      int ml = ag.most_likely();
      double half = 0.5 * (ag.length + cfg.ego_length);
      int forced = 0;
      for (int i = 1; i <= n; ++i) {
        double s_cv = state.s + state.v * i * dt;
        if (ag.state_at(ml, state.k + i).s - s_cv - half <= 0.0) {
          forced = i;
          break;
        }
      }
      if (forced > 0) {
        double reach = ag.state_at(ml, state.k + forced).s - half - state.s;
        double a_cap = std::max(a_top, a_lim);
        double v_need = (std::max(0.0, reach) + forced * a_cap * dt * dt) /
                        (forced * dt);
        // One clamped stop step sheds up to b_hard*dt for free, and when the
        // ego is above its desired speed a velocity-target step can shed up
        // to a_lim*dt without an accel penalty; both are granted before any
        // shedding is priced.
        double v_floor = std::max(v_need, cfg.idm.b_hard * dt);
        double dv = state.v - v_floor;
        if (cfg.v_desired < state.v) dv -= a_lim * dt;
        if (dv > 0.0) {
          double r = -2.0 * dv / dt - state.a;
          double m = static_cast<double>(forced);
          if (r < 0.0) {
            double ja = sq(r) / (4.0 * (m - 1.0) + 1.0);
            for (int i = 0; i < forced; ++i)
              out.per_step[static_cast<std::size_t>(i)].j_accel = ja / m;
          }
          double rp = r - state.a * (2.0 * m - 1.0);
          if (rp < 0.0) {
            double dd = m * (2.0 * m - 1.0) * (2.0 * m + 1.0) / 3.0;
            double jd = sq(rp) / (sq(dt) * dd);
            for (int i = 0; i < forced; ++i)
              out.per_step[static_cast<std::size_t>(i)].j_accel_rate = jd / m;
          }
        }
      }
    }
  }

  double velocity_total = 0.0;
  double interact_total = 0.0;
  for (const PerStepBound& b : out.per_step) {
    velocity_total += weights.w_velocity * b.j_velocity;
    interact_total += weights.w_front * b.j_front +
                      weights.w_cut_in * b.j_cut_in +
                      weights.w_accel * b.j_accel +
                      weights.w_accel_rate * b.j_accel_rate;
  }
  if (escape) interact_total = std::min(interact_total, weights.w_lane_change);
  out.value = velocity_total + interact_total;
  return out;
}

double heuristic_value(const VehicleState& state, const WorldView& world,
                       const CostWeights& weights, const PlannerConfig& cfg,
                       BranchingMode mode, HeuristicKind kind) {
  if (kind == HeuristicKind::none) return 0.0;
  return full_heuristic(state, world, weights, cfg, mode).value;
}

}  // namespace gbplan
