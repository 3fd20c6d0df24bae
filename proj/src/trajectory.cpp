#include "gbplan/trajectory.hpp"

#include <cmath>
#include <iomanip>

#include "gbplan/errors.hpp"

namespace gbplan {

Quintic fit_quintic(double horizon, double p0, double v0, double a0, double p1,
                    double v1, double a1) {
  if (horizon <= 0.0) throw InvalidInput("fit_quintic: horizon must be > 0");
  const double T = horizon;
  const double dp = p1 - p0 - v0 * T - 0.5 * a0 * T * T;
  const double dv = v1 - v0 - a0 * T;
  const double da = a1 - a0;
  const double T3 = T * T * T;
  Quintic q;
  q[0] = p0;
  q[1] = v0;
  q[2] = 0.5 * a0;
  q[3] = (20.0 * dp - 8.0 * dv * T + da * T * T) / (2.0 * T3);
  q[4] = (-30.0 * dp + 14.0 * dv * T - 2.0 * da * T * T) / (2.0 * T3 * T);
  q[5] = (12.0 * dp - 6.0 * dv * T + da * T * T) / (2.0 * T3 * T * T);
  return q;
}

double quintic_eval(const Quintic& q, double t, int deriv) {
  switch (deriv) {
    case 0:
      return q[0] +
             t * (q[1] + t * (q[2] + t * (q[3] + t * (q[4] + t * q[5]))));
    case 1:
      return q[1] +
             t * (2.0 * q[2] +
                  t * (3.0 * q[3] + t * (4.0 * q[4] + t * 5.0 * q[5])));
    case 2:
      return 2.0 * q[2] +
             t * (6.0 * q[3] + t * (12.0 * q[4] + t * 20.0 * q[5]));
    case 3:
      return 6.0 * q[3] + t * (24.0 * q[4] + t * 60.0 * q[5]);
    default:
      throw InvalidInput("quintic_eval: deriv must be 0..3");
  }
}

RefinedTrajectory refine(const VehicleState& root,
                         const std::vector<PlanStep>& steps,
                         const RoadMap& road, const PlannerConfig& cfg,
                         double dt_fine) {
  if (dt_fine <= 0.0 || dt_fine > cfg.dt)
    throw InvalidInput("refine: dt_fine must be in (0, dt]");
  const int n_fine = std::max(1, static_cast<int>(std::lround(cfg.dt / dt_fine)));
  const double tf = cfg.dt / n_fine;

  RefinedTrajectory out;
  out.dt_fine = tf;
  out.steps.reserve(steps.size());

  VehicleState prev = root;
  double time0 = 0.0;
  for (const PlanStep& step : steps) {
    const LanePath& frame = road.at(step.state.lane);

    double s0, d0, tr0;
    if (prev.lane == frame.id) {
      s0 = prev.s;
      d0 = prev.d;
      tr0 = theta_rel(prev, frame);
    } else {
      const LanePath& old_frame = road.at(prev.lane);
      CartesianPose pose = offset_pose_extrapolated(
          old_frame, prev.s, prev.d, theta_rel(prev, old_frame));
      FrenetPose fp =
          cartesian_to_frenet(frame, pose, cfg.corridor_half_width);
      s0 = fp.s;
      d0 = fp.d;
      tr0 = fp.theta_rel;
    }
    const double s1 = step.state.s, d1 = step.state.d;
    const double tr1 = theta_rel(step.state, frame);

    // Boundary velocity and accel are split between the two coordinates by
    // the heading offset, so speed and tangential accel at the knots equal
    // the planned state values in any frame.
    Quintic qs = fit_quintic(cfg.dt, s0, prev.v * std::cos(tr0),
                             prev.a * std::cos(tr0), s1,
                             step.state.v * std::cos(tr1),
                             step.state.a * std::cos(tr1));
    Quintic qd = fit_quintic(cfg.dt, d0, prev.v * std::sin(tr0),
                             prev.a * std::sin(tr0), d1,
                             step.state.v * std::sin(tr1),
                             step.state.a * std::sin(tr1));

    RefinedStep rs;
    rs.points.reserve(n_fine + 1);
    double last_tr = tr0;
    for (int i = 0; i <= n_fine; ++i) {
      double t = (i == n_fine) ? cfg.dt : i * tf;
      double sd1 = quintic_eval(qs, t, 1), dd1 = quintic_eval(qd, t, 1);
      double sd2 = quintic_eval(qs, t, 2), dd2 = quintic_eval(qd, t, 2);
      double sd3 = quintic_eval(qs, t, 3), dd3 = quintic_eval(qd, t, 3);
      double v = std::hypot(sd1, dd1);
      double tr = v < 1e-9 ? last_tr : std::atan2(dd1, sd1);
      last_tr = tr;
      CartesianPose pose = offset_pose_extrapolated(
          frame, quintic_eval(qs, t, 0), quintic_eval(qd, t, 0), tr);
      TrajectoryPoint p;
      p.t = time0 + t;
      p.x = pose.x;
      p.y = pose.y;
      p.theta = pose.theta;
      p.v = v;
      if (v < 1e-9) {
        p.a = sd2 * std::cos(tr) + dd2 * std::sin(tr);
        p.jerk = sd3 * std::cos(tr) + dd3 * std::sin(tr);
      } else {
        double at = (sd1 * sd2 + dd1 * dd2) / v;
        p.a = at;
        p.jerk = (sd2 * sd2 + dd2 * dd2 + sd1 * sd3 + dd1 * dd3 - at * at) / v;
      }
      rs.points.push_back(p);
    }
    out.steps.push_back(std::move(rs));
    prev = step.state;
    time0 += cfg.dt;
  }
  return out;
}

void write_csv(const RefinedTrajectory& trajectory, std::ostream& os) {
  os << "t,x,y,theta,v,a,jerk\n";
  os << std::setprecision(10);
  bool first_step = true;
  for (const RefinedStep& step : trajectory.steps) {
    std::size_t begin = first_step ? 0 : 1;  // knot already written
    for (std::size_t i = begin; i < step.points.size(); ++i) {
      const TrajectoryPoint& p = step.points[i];
      os << p.t << ',' << p.x << ',' << p.y << ',' << p.theta << ',' << p.v
         << ',' << p.a << ',' << p.jerk << '\n';
    }
    first_step = false;
  }
}

}  // namespace gbplan
