#pragma once

#include <array>
#include <ostream>
#include <vector>

#include "gbplan/geometry.hpp"
#include "gbplan/search.hpp"

namespace gbplan {

// Quintic polynomial coefficients, lowest order first.
using Quintic = std::array<double, 6>;

// Fit x(t) on [0, horizon] matching position, velocity, and accel at both
// ends.  horizon must be > 0.
Quintic fit_quintic(double horizon, double p0, double v0, double a0, double p1,
                    double v1, double a1);

// Evaluate the polynomial or one of its first three derivatives.
double quintic_eval(const Quintic& q, double t, int deriv = 0);

struct TrajectoryPoint {
  double t = 0.0;  // absolute time from the start of the plan
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double a = 0.0;     // tangential accel
  double jerk = 0.0;  // d/dt of the tangential accel
};

// One planning step resampled on a fine grid; both endpoints included.
struct RefinedStep {
  std::vector<TrajectoryPoint> points;
};

struct RefinedTrajectory {
  double dt_fine = 0.05;
  std::vector<RefinedStep> steps;
};

// Resample a plan at dt_fine.  Each step is fitted with one quintic per
// Frenet coordinate in the frame of the lane the step ends on, with boundary
// velocity/accel split by the heading offset so that consecutive steps agree
// on position, heading, speed, and accel at the shared knot.
RefinedTrajectory refine(const VehicleState& root,
                         const std::vector<PlanStep>& steps,
                         const RoadMap& road, const PlannerConfig& cfg,
                         double dt_fine = 0.05);

// t,x,y,theta,v,a,jerk rows; knots shared by two steps are written once.
void write_csv(const RefinedTrajectory& trajectory, std::ostream& os);

}  // namespace gbplan
