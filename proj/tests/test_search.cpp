#include "doctest.h"

#include <cmath>
#include <random>
#include <string>

#include "gbplan/search.hpp"
#include "oracles.hpp"
#include "world_fixtures.hpp"

using namespace gbplan;
using fixtures::cv_agent;
using fixtures::ego_on;

TEST_CASE("planner returns the enumerated optimum on small instances") {
  PlannerConfig cfg;
  cfg.horizon_steps = 3;
  CostWeights weights;
  RoadMap two = fixtures::two_lane_road();
  RoadMap one = fixtures::single_lane_road();
  std::mt19937_64 rng(4101);
  auto draw = [&](double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>()(rng);
  };

  int solved = 0;
  for (int trial = 0; trial < 25; ++trial) {
    bool multi = trial % 2 == 1;
    RoadMap& road = multi ? two : one;
    std::string lane = multi ? "right" : "main";
    PredictionSet preds;
    for (int i = 0; i < trial % 3; ++i) {
      preds.agents.push_back(cv_agent(
          "a" + std::to_string(i), multi && i % 2 == 1 ? "left" : lane,
          draw(115.0, 250.0), draw(2.0, 12.0), cfg.horizon_steps));
    }
    WorldView world{&road, &preds};
    VehicleState root = fixtures::ego_on(lane, draw(80.0, 105.0),
                                         draw(2.0, 13.0), draw(-1.5, 1.5));

    for (BranchingMode mode : {BranchingMode::proposed, BranchingMode::passive,
                               BranchingMode::baseline}) {
      oracle::CostToGo ref =
          oracle::enumerate_cost_to_go(root, world, cfg, weights, mode);
      for (HeuristicKind kind : {HeuristicKind::none, HeuristicKind::full}) {
        SearchResult res = plan(root, world, cfg, weights, mode, kind);
        if (!ref.feasible) {
          CHECK(res.status == SearchStatus::no_solution);
          continue;
        }
        ++solved;
        REQUIRE(res.status == SearchStatus::found);
        CHECK(res.total_cost == doctest::Approx(ref.total).epsilon(1e-9));
        REQUIRE(res.steps.size() == static_cast<std::size_t>(cfg.horizon_steps));

        // The returned chain must be self-consistent: accumulated costs add
        // up, every edge re-evaluates to the stored breakdown, and the stored
        // heuristic matches a fresh evaluation.
        double g = 0.0;
        VehicleState prev = root;
        for (const PlanStep& step : res.steps) {
          CostBreakdown again =
              edge_cost(prev, step.state, step.action, world, weights, cfg);
          CHECK(step.edge.total == doctest::Approx(again.total).epsilon(1e-12));
          g += step.edge.total;
          CHECK(step.g == doctest::Approx(g).epsilon(1e-12));
          CHECK(step.h ==
                doctest::Approx(heuristic_value(step.state, world, weights, cfg,
                                                mode, kind))
                    .epsilon(1e-12));
          CHECK(step.state.k == prev.k + 1);
          prev = step.state;
        }
        CHECK(res.total_cost == doctest::Approx(g).epsilon(1e-12));
        CHECK(res.steps.back().h == 0.0);
      }
    }
  }
  CHECK(solved >= 60);  // the sampler must not degenerate into walls
}

TEST_CASE("planner picks the cheaper accel rung at every step") {
  RoadMap road = fixtures::single_lane_road();
  PredictionSet empty;
  WorldView world{&road, &empty};
  PlannerConfig cfg;
  cfg.horizon_steps = 2;
  cfg.accel_set = {1.0, 1.4};
  CostWeights w;
  w.w_front = w.w_cut_in = w.w_velocity = w.w_accel_rate = w.w_lane_change = 0.0;
  w.w_accel = 1.0;
  VehicleState root = ego_on("main", 50.0, 5.0, 1.0);

  SearchResult res = plan(root, world, cfg, w, BranchingMode::baseline,
                          HeuristicKind::none);
  REQUIRE(res.status == SearchStatus::found);
  CHECK(res.total_cost == doctest::Approx(2.0).epsilon(1e-12));
  for (const PlanStep& step : res.steps) {
    CHECK(step.action.lon == Action::Lon::accel_target);
    CHECK(step.action.value == doctest::Approx(1.0));
    CHECK(step.state.a == doctest::Approx(1.0));
  }
}

TEST_CASE("a single-action world is walked with minimal bookkeeping") {
  RoadMap road = fixtures::single_lane_road();
  PredictionSet empty;
  WorldView world{&road, &empty};
  PlannerConfig cfg;
  cfg.horizon_steps = 4;
  cfg.accel_set = {0.0};
  CostWeights w;
  VehicleState root = ego_on("main", 50.0, 8.0, 0.0);

  SearchResult res = plan(root, world, cfg, w, BranchingMode::baseline,
                          HeuristicKind::none);
  REQUIRE(res.status == SearchStatus::found);
  CHECK(res.steps.size() == 4);
  CHECK(res.expanded == 5);   // root, three inner nodes, goal
  CHECK(res.generated == 5);  // root plus one child per expansion
}

TEST_CASE("depth-preferring tie-break dives straight through zero-cost plateaus") {
  RoadMap road = fixtures::single_lane_road();
  PredictionSet empty;
  WorldView world{&road, &empty};
  PlannerConfig cfg;
  cfg.horizon_steps = 6;
  cfg.accel_set = {-1.0, 0.0, 1.0};
  CostWeights w;
  w.w_front = w.w_cut_in = w.w_velocity = 0.0;
  w.w_accel = w.w_accel_rate = w.w_lane_change = 0.0;
  VehicleState root = ego_on("main", 100.0, 10.0, 0.0);

  SearchResult res = plan(root, world, cfg, w, BranchingMode::baseline,
                          HeuristicKind::none);
  REQUIRE(res.status == SearchStatus::found);
  CHECK(res.total_cost == 0.0);
  // Every f ties at zero, so the deeper-then-earlier ordering walks one chain
  // to the horizon: 7 pops, and 14 pushes (3 slew-reachable accels from rest,
  // then 2 from the -1 rail the dive follows).
  CHECK(res.expanded == 7);
  CHECK(res.generated == 14);
}

TEST_CASE("a walled-in root reports no solution") {
  RoadMap road = fixtures::single_lane_road();
  PlannerConfig cfg;
  PredictionSet preds;
  preds.agents.push_back(cv_agent("wall", "main", 110.5, 0.0, cfg.horizon_steps));
  WorldView world{&road, &preds};
  VehicleState root = ego_on("main", 100.0, 10.0, 0.0);

  SearchResult res = plan(root, world, cfg, CostWeights{},
                          BranchingMode::proposed, HeuristicKind::full);
  CHECK(res.status == SearchStatus::no_solution);
  CHECK(res.steps.empty());
  CHECK(res.expanded == 1);
  CHECK(res.generated == 1);
}

TEST_CASE("the expansion budget cuts the search off cleanly") {
  RoadMap road = fixtures::single_lane_road();
  PredictionSet empty;
  WorldView world{&road, &empty};
  PlannerConfig cfg;
  cfg.horizon_steps = 4;
  cfg.accel_set = {0.0};
  cfg.max_expansions = 2;
  VehicleState root = ego_on("main", 50.0, 8.0, 0.0);

  SearchResult res = plan(root, world, cfg, CostWeights{},
                          BranchingMode::baseline, HeuristicKind::none);
  CHECK(res.status == SearchStatus::limit);
  CHECK(res.expanded == 2);
  CHECK(res.steps.empty());
}

TEST_CASE("a root already at the horizon is its own plan") {
  RoadMap road = fixtures::single_lane_road();
  PredictionSet empty;
  WorldView world{&road, &empty};
  PlannerConfig cfg;
  VehicleState root = ego_on("main", 50.0, 8.0, 0.0);
  root.k = cfg.horizon_steps;

  SearchResult res = plan(root, world, cfg, CostWeights{},
                          BranchingMode::proposed, HeuristicKind::full);
  CHECK(res.status == SearchStatus::found);
  CHECK(res.steps.empty());
  CHECK(res.total_cost == 0.0);
  CHECK(res.expanded == 1);
}

TEST_CASE("planning twice yields bit-identical results") {
  RoadMap road = fixtures::two_lane_road();
  PlannerConfig cfg;
  PredictionSet preds;
  preds.agents.push_back(cv_agent("lead", "right", 130.0, 6.0, cfg.horizon_steps));
  preds.agents.push_back(cv_agent("left", "left", 90.0, 11.0, cfg.horizon_steps));
  WorldView world{&road, &preds};
  VehicleState root = ego_on("right", 100.0, 10.0, 0.0);

  for (HeuristicKind kind : {HeuristicKind::none, HeuristicKind::full}) {
    SearchResult a = plan(root, world, cfg, CostWeights{},
                          BranchingMode::proposed, kind);
    SearchResult b = plan(root, world, cfg, CostWeights{},
                          BranchingMode::proposed, kind);
    REQUIRE(a.status == b.status);
    CHECK(a.total_cost == b.total_cost);  // bitwise, no tolerance
    CHECK(a.expanded == b.expanded);
    CHECK(a.generated == b.generated);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      CHECK(a.steps[i].state.s == b.steps[i].state.s);
      CHECK(a.steps[i].state.lane == b.steps[i].state.lane);
      CHECK(a.steps[i].action.lat == b.steps[i].action.lat);
    }
  }
}

TEST_CASE("the informed search never expands more nodes than the blind one") {
  PlannerConfig cfg;
  CostWeights weights;
  RoadMap road = fixtures::two_lane_road();
  std::mt19937_64 rng(777);
  auto draw = [&](double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>()(rng);
  };

  int informative = 0;
  for (int trial = 0; trial < 15; ++trial) {
    PredictionSet preds;
    preds.agents.push_back(cv_agent("lead", "right", draw(125.0, 160.0),
                                    draw(3.0, 8.0), cfg.horizon_steps));
    if (trial % 2 == 0) {
      preds.agents.push_back(cv_agent("side", "left", draw(70.0, 140.0),
                                      draw(6.0, 12.0), cfg.horizon_steps));
    }
    WorldView world{&road, &preds};
    VehicleState root = ego_on("right", 100.0, draw(6.0, 12.0), 0.0);

    SearchResult blind = plan(root, world, cfg, weights,
                              BranchingMode::proposed, HeuristicKind::none);
    SearchResult informed = plan(root, world, cfg, weights,
                                 BranchingMode::proposed, HeuristicKind::full);
    REQUIRE(blind.status == informed.status);
    if (blind.status != SearchStatus::found) continue;
    CHECK(informed.total_cost == doctest::Approx(blind.total_cost).epsilon(1e-9));
    CHECK(informed.expanded <= blind.expanded);
    if (informed.expanded < blind.expanded) ++informative;
  }
  CHECK(informative > 0);
}
