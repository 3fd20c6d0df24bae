#pragma once

#include <vector>

#include "gbplan/behavior_graph.hpp"
#include "gbplan/cost_model.hpp"

namespace gbplan {

enum class SearchStatus { found, no_solution, limit };

// One edge of the returned plan: the action applied at the parent state and
// the state it produced.
struct PlanStep {
  Action action;
  VehicleState state;
  CostBreakdown edge;
  double g = 0.0;  // accumulated cost from the root up to `state`
  double h = 0.0;  // heuristic value at `state`
};

struct SearchResult {
  SearchStatus status = SearchStatus::no_solution;
  VehicleState root;
  std::vector<PlanStep> steps;  // root..horizon, empty unless found
  double total_cost = 0.0;
  long expanded = 0;   // nodes popped from the queue (root and goal included)
  long generated = 0;  // nodes pushed onto the queue (root included)
};

// Best-first tree search over the behavior graph out to cfg.horizon_steps.
// The first node popped at the horizon is returned; with an admissible
// heuristic that plan is optimal.  Ties on f prefer deeper nodes, then
// smaller h, then insertion order, which keeps zero-cost plateaus from
// ballooning.
SearchResult plan(const VehicleState& root, const WorldView& world,
                  const PlannerConfig& cfg, const CostWeights& weights,
                  BranchingMode mode, HeuristicKind heuristic);

}  // namespace gbplan
