#include "gbplan/predictions.hpp"

#include <cmath>

namespace gbplan {

std::size_t AgentPrediction::most_likely() const {
  std::size_t best = 0;
  for (std::size_t m = 1; m < hypotheses.size(); ++m) {
    if (hypotheses[m].probability > hypotheses[best].probability) best = m;
  }
  return best;
}

PredictedState AgentPrediction::state_at(std::size_t m, int k) const {
  if (k <= 0) return {s0, v0};
  const auto& states = hypotheses[m].states;
  std::size_t idx = static_cast<std::size_t>(k) - 1;
  if (idx >= states.size()) return states.back();
  return states[idx];
}

PredictedState AgentPrediction::interpolate(std::size_t m, double step_time) const {
  if (step_time <= 0.0) return {s0, v0};
  double lo = std::floor(step_time);
  double frac = step_time - lo;
  PredictedState a = state_at(m, static_cast<int>(lo));
  if (frac < 1e-12) return a;
  PredictedState b = state_at(m, static_cast<int>(lo) + 1);
  return {a.s + (b.s - a.s) * frac, a.v + (b.v - a.v) * frac};
}

}  // namespace gbplan
