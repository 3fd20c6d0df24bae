#pragma once

#include <string>
#include <vector>

#include "gbplan/geometry.hpp"

namespace gbplan {

/// Lane-relative predicted state of one agent at one future step.
struct PredictedState {
  double s = 0.0;
  double v = 0.0;
};

/// One maneuver hypothesis: the agent holds its lane and follows `states` at
/// steps k = 1..T (the current state lives on the owning AgentPrediction).
struct PredictionHypothesis {
  std::vector<PredictedState> states;
  double probability = 0.0;
};

struct AgentPrediction {
  std::string agent_id;
  std::string lane;
  double s0 = 0.0;  // current position along the lane
  double v0 = 0.0;
  double length = 4.5;
  double width = 2.0;
  std::vector<PredictionHypothesis> hypotheses;

  /// Index of the highest-probability hypothesis (first wins ties).
  std::size_t most_likely() const;

  /// Position/speed of hypothesis m at integer step k (k = 0 returns the
  /// current state).
  PredictedState state_at(std::size_t m, int k) const;

  /// Linear interpolation of hypothesis m at fractional step time.
  PredictedState interpolate(std::size_t m, double step_time) const;
};

struct PredictionSet {
  std::vector<AgentPrediction> agents;
};

}  // namespace gbplan
