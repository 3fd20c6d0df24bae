#include "gbplan/driver_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gbplan {

double idm_acceleration(double v_ego, const std::optional<IdmLeader>& leader,
                        const IdmParams& p) {
  if (v_ego < 0.0) throw InvalidInput("idm_acceleration: v_ego must be >= 0");
  if (p.v_desired <= 0.0) throw InvalidInput("idm_acceleration: v_desired must be > 0");
  if (p.a_max <= 0.0 || p.b_comf <= 0.0) {
    throw InvalidInput("idm_acceleration: a_max and b_comf must be > 0");
  }

  double a = 1.0 - std::pow(v_ego / p.v_desired, p.delta);
  if (leader) {
    if (leader->gap <= 0.0) throw InvalidInput("idm_acceleration: non-positive gap");
    double dv = v_ego - leader->v;
    double s_star = p.min_gap + v_ego * p.time_headway +
                    v_ego * dv / (2.0 * std::sqrt(p.a_max * p.b_comf));
    double ratio = s_star / leader->gap;
    a -= ratio * ratio;
  }
  return std::clamp(p.a_max * a, -p.b_hard, p.a_max);
}

LaneChangeDecision mobil_decision(const MobilContext& current, const MobilContext& target,
                                  double v_ego, double ego_length, const IdmParams& idm,
                                  const MobilParams& p) {
  auto check = [](const std::optional<MobilVehicle>& v, const char* what) {
    if (v && v->gap < 0.0) {
      throw InvalidInput(std::string("mobil_decision: negative gap for ") + what);
    }
  };
  check(current.leader, "current leader");
  check(current.follower, "current follower");
  check(target.leader, "target leader");
  check(target.follower, "target follower");

  auto as_leader = [](const std::optional<MobilVehicle>& v) -> std::optional<IdmLeader> {
    if (!v) return std::nullopt;
    return IdmLeader{v->gap, v->v};
  };
  // Gap between a follower and the leader on the far side of the ego.
  auto through_gap = [&](const MobilVehicle& f, const MobilVehicle& l) -> std::optional<IdmLeader> {
    return IdmLeader{f.gap + ego_length + l.gap, l.v};
  };

  // Safety: the prospective new follower must not be forced below -b_safe.
  double a_new_follower_after = 0.0;
  if (target.follower) {
    a_new_follower_after =
        idm_acceleration(target.follower->v, IdmLeader{target.follower->gap, v_ego}, idm);
    if (a_new_follower_after < -p.b_safe) return LaneChangeDecision::stay;
  }

  double a_ego = idm_acceleration(v_ego, as_leader(current.leader), idm);
  double a_ego_after = idm_acceleration(v_ego, as_leader(target.leader), idm);

  double a_new_follower = 0.0;
  if (target.follower) {
    a_new_follower = idm_acceleration(
        target.follower->v,
        target.leader ? through_gap(*target.follower, *target.leader) : std::optional<IdmLeader>{},
        idm);
  }

  double a_old_follower = 0.0;
  double a_old_follower_after = 0.0;
  if (current.follower) {
    a_old_follower =
        idm_acceleration(current.follower->v, IdmLeader{current.follower->gap, v_ego}, idm);
    a_old_follower_after = idm_acceleration(
        current.follower->v,
        current.leader ? through_gap(*current.follower, *current.leader)
                       : std::optional<IdmLeader>{},
        idm);
  }

  double incentive = (a_ego_after - a_ego) +
                     p.politeness * ((a_new_follower_after - a_new_follower) +
                                     (a_old_follower_after - a_old_follower));
  return incentive > p.a_threshold ? LaneChangeDecision::change : LaneChangeDecision::stay;
}

double pure_pursuit_curvature(const CartesianPose& pose, const LanePath& target,
                              double lookahead, double kappa_max) {
  if (lookahead <= 0.0) throw InvalidInput("pure_pursuit_curvature: lookahead must be > 0");
  FrenetPose foot =
      cartesian_to_frenet(target, pose, std::numeric_limits<double>::infinity());
  double s_look = foot.s + lookahead;
  if (s_look > target.length() + 1e-9) {
    throw OutOfDomain("pure_pursuit_curvature: lookahead point beyond path end");
  }
  Vec2 lp = target.point_at(std::min(s_look, target.length()));
  double dx = lp.x - pose.x;
  double dy = lp.y - pose.y;
  double y_l = -std::sin(pose.theta) * dx + std::cos(pose.theta) * dy;
  double kappa = 2.0 * y_l / (lookahead * lookahead);
  return std::clamp(kappa, -kappa_max, kappa_max);
}

namespace {

// Bang-bang (optionally saturated) profile toward higher velocity.  Callers
// mirror the sign for decelerating transfers.
std::vector<JerkPhase> up_phases(double a0, double dv, double j, double a_lim) {
  std::vector<JerkPhase> phases;
  double peak = std::sqrt(j * dv + 0.5 * a0 * a0);
  if (peak <= a_lim + 1e-12) {
    peak = std::min(peak, a_lim);
    if (peak - a0 > 1e-12) phases.push_back({(peak - a0) / j, j});
    if (peak > 1e-12) phases.push_back({peak / j, -j});
  } else {
    double ramp_area = (2.0 * a_lim * a_lim - a0 * a0) / (2.0 * j);
    phases.push_back({(a_lim - a0) / j, j});
    phases.push_back({(dv - ramp_area) / a_lim, 0.0});
    phases.push_back({a_lim / j, -j});
  }
  return phases;
}

}  // namespace

JerkProfile time_optimal_velocity_profile(double v0, double a0, double v_target,
                                          double j_max, double a_lim) {
  if (j_max <= 0.0 || a_lim <= 0.0) {
    throw InvalidInput("time_optimal_velocity_profile: j_max and a_lim must be > 0");
  }
  if (std::abs(a0) > a_lim + 1e-9) {
    throw InvalidInput("time_optimal_velocity_profile: |a0| exceeds a_lim");
  }
  if (v0 < 0.0 || v_target < 0.0) {
    throw InvalidInput("time_optimal_velocity_profile: velocities must be >= 0");
  }

  double dv = v_target - v0;
  // Velocity change accumulated by letting a0 decay straight to zero.
  double decay_area = (a0 >= 0.0 ? 1.0 : -1.0) * a0 * a0 / (2.0 * j_max);

  JerkProfile profile;
  if (std::abs(dv - decay_area) <= 1e-12 * std::max(1.0, std::abs(dv))) {
    if (std::abs(a0) > 1e-12) {
      profile.phases.push_back({std::abs(a0) / j_max, a0 > 0.0 ? -j_max : j_max});
    }
  } else if (dv > decay_area) {
    profile.phases = up_phases(a0, dv, j_max, a_lim);
  } else {
    profile.phases = up_phases(-a0, -dv, j_max, a_lim);
    for (auto& ph : profile.phases) ph.jerk = -ph.jerk;
  }

  double t = 0.0;
  double s = 0.0;
  double v = v0;
  double a = a0;
  for (const auto& ph : profile.phases) {
    double tau = ph.duration;
    s += v * tau + 0.5 * a * tau * tau + ph.jerk * tau * tau * tau / 6.0;
    v += a * tau + 0.5 * ph.jerk * tau * tau;
    a += ph.jerk * tau;
    t += tau;
  }
  profile.total_time = t;
  profile.distance = s;
  profile.v_end = v;
  profile.a_end = a;
  return profile;
}

ProfileState profile_state_at(const JerkProfile& profile, double v0, double a0, double t) {
  ProfileState st{0.0, v0, a0};
  double remaining = t;
  for (const auto& ph : profile.phases) {
    if (remaining <= 0.0) break;
    double tau = std::min(remaining, ph.duration);
    st.s += st.v * tau + 0.5 * st.a * tau * tau + ph.jerk * tau * tau * tau / 6.0;
    st.v += st.a * tau + 0.5 * ph.jerk * tau * tau;
    st.a += ph.jerk * tau;
    remaining -= tau;
  }
  if (remaining > 0.0) {
    // Coast past the end of the profile.
    st.s += st.v * remaining;
    st.a = 0.0;
  }
  return st;
}

}  // namespace gbplan
