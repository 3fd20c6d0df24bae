#include "gbplan/search.hpp"

#include <algorithm>
#include <queue>

namespace gbplan {

namespace {

struct Node {
  VehicleState state;
  long parent = -1;
  Action action;
  CostBreakdown edge;
  double g = 0.0;
  double h = 0.0;
};

struct QueueEntry {
  double f = 0.0;
  int k = 0;
  double h = 0.0;
  long seq = 0;
  long node = 0;
};

// priority_queue pops the "largest" element, so this orders worse-first:
// higher f loses, then shallower depth, then larger h, then later insertion.
struct Worse {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.k != b.k) return a.k < b.k;
    if (a.h != b.h) return a.h > b.h;
    return a.seq > b.seq;
  }
};

}  // namespace

SearchResult plan(const VehicleState& root, const WorldView& world,
                  const PlannerConfig& cfg, const CostWeights& weights,
                  BranchingMode mode, HeuristicKind heuristic) {
  cfg.validate();
  weights.validate();

  SearchResult result;
  result.root = root;

  std::vector<Node> arena;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, Worse> open;
  long seq = 0;

  Node first;
  first.state = root;
  first.h = heuristic_value(root, world, weights, cfg, mode, heuristic);
  arena.push_back(first);
  open.push(QueueEntry{first.h, root.k, first.h, seq++, 0});
  result.generated = 1;

  while (!open.empty()) {
    QueueEntry top = open.top();
    open.pop();
    ++result.expanded;
    const long current = top.node;

    if (arena[current].state.k >= cfg.horizon_steps) {
      result.status = SearchStatus::found;
      result.total_cost = arena[current].g;
      for (long at = current; arena[at].parent >= 0; at = arena[at].parent) {
        PlanStep step;
        step.action = arena[at].action;
        step.state = arena[at].state;
        step.edge = arena[at].edge;
        step.g = arena[at].g;
        step.h = arena[at].h;
        result.steps.push_back(step);
      }
      std::reverse(result.steps.begin(), result.steps.end());
      return result;
    }
    if (result.expanded >= cfg.max_expansions) {
      result.status = SearchStatus::limit;
      return result;
    }

    const VehicleState parent_state = arena[current].state;
    const double parent_g = arena[current].g;
    for (const Action& action :
         select_actions(parent_state, world, cfg, mode)) {
      auto expansion = expand_action(parent_state, action, world, cfg);
      if (!expansion) continue;
      Node child;
      child.state = expansion->state;
      child.parent = current;
      child.action = action;
      child.edge = edge_cost(parent_state, child.state, action, world, weights,
                             cfg);
      child.g = parent_g + child.edge.total;
      child.h =
          heuristic_value(child.state, world, weights, cfg, mode, heuristic);
      arena.push_back(child);
      open.push(QueueEntry{child.g + child.h, child.state.k, child.h, seq++,
                           static_cast<long>(arena.size()) - 1});
      ++result.generated;
    }
  }

  result.status = SearchStatus::no_solution;
  return result;
}

}  // namespace gbplan
