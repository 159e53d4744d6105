#include <algorithm>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ipp/errors.hpp"

using namespace ipp;

TEST_SUITE("env") {

TEST_CASE("reset state") {
  const auto inst = testing::grid_instance(3, 3, 0, 8, 6.0);
  const Episode ep(inst);
  CHECK(ep.state().path == std::vector<VertexId>{0});
  CHECK(ep.state().remaining_budget == 6.0);
  CHECK(ep.state().cumulative_reward == 0.0);
  CHECK_FALSE(ep.done());
  CHECK(ep.path_reward() == doctest::Approx(inst.reward(std::vector<VertexId>{0})));
  CHECK(inst.start_reward() == doctest::Approx(inst.reward(std::vector<VertexId>{0})));
  CHECK(ep.actions() == std::vector<VertexId>{1, 3});
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(testing::grid_instance(3, 3, 0, 8, 3.9), InvalidArgument);
  CHECK_NOTHROW(testing::grid_instance(3, 3, 0, 8, 4.0));
  CHECK_THROWS_AS(testing::grid_instance(3, 3, 0, 9, 10.0), InvalidArgument);
  const auto inst = testing::grid_instance(3, 3, 0, 8, 4.0);
  CHECK(inst.is_valid(std::vector<VertexId>{0, 1, 2, 5, 8}));
  CHECK_FALSE(inst.is_valid(std::vector<VertexId>{0, 1, 2, 5}));
  CHECK_FALSE(inst.is_valid(std::vector<VertexId>{0, 2, 5, 8}));
  CHECK_FALSE(inst.with(0, 8, 5.0).is_valid(std::vector<VertexId>{0, 1, 0, 1, 2, 5, 8}));
  CHECK(inst.step_cap() == 16);
}

TEST_CASE("constrained actions match the lookahead rule") {
  std::mt19937_64 rng(3);
  const auto inst = testing::grid_instance(4, 3, 0, 11, 9.0);
  const auto& g = inst.graph();
  for (int e = 0; e < 50; ++e) {
    Episode ep(inst);
    while (!ep.done()) {
      std::vector<VertexId> want;
      for (const auto& n : g.neighbors(ep.state().current()))
        if (n.cost + g.shortest_path_cost(n.vertex, inst.terminal()) <=
            ep.state().remaining_budget + 1e-9)
          want.push_back(n.vertex);
      CHECK(ep.valid_actions() == want);
      ep.step(ep.explore_action(rng));
    }
    CHECK(ep.succeeded());
    CHECK(inst.is_valid(ep.state().path));
  }
}

TEST_CASE("step rewards telescope to the path reward") {
  std::mt19937_64 rng(5);
  const auto inst = testing::grid_instance(4, 4, 0, 0, 10.0);
  for (int e = 0; e < 30; ++e) {
    Episode ep(inst);
    double sum = 0;
    while (!ep.done()) sum += ep.step(ep.explore_action(rng)).reward;
    CHECK(sum == doctest::Approx(inst.reward(ep.state().path) - inst.start_reward()).epsilon(1e-9));
    CHECK(ep.path_reward() == doctest::Approx(inst.reward(ep.state().path)).epsilon(1e-9));
  }
}

TEST_CASE("infeasible action ends the episode with the return voided") {
  const auto inst = testing::grid_instance(3, 3, 0, 2, 2.0);
  Episode ep(inst);
  const auto t1 = ep.step(1);
  CHECK(t1.reward > 0.0);
  CHECK_FALSE(t1.done);
  const auto t2 = ep.step(4);  // cannot return to 2 within the budget
  CHECK(t2.done);
  CHECK(t2.next.penalized);
  CHECK(t2.next.path == t2.state.path);
  CHECK(t2.reward == doctest::Approx(-t1.reward));
  CHECK_FALSE(ep.succeeded());
  CHECK_THROWS_AS(ep.step(2), ContractViolation);
  CHECK_THROWS_AS(ep.valid_actions(), ContractViolation);
}

TEST_CASE("non-adjacent action is rejected") {
  const auto inst = testing::grid_instance(3, 3, 0, 8, 6.0);
  Episode ep(inst);
  CHECK_THROWS_AS(ep.step(8), InvalidAction);
  CHECK_THROWS_AS(ep.step(-1), InvalidAction);
  CHECK_FALSE(ep.done());
}

TEST_CASE("tour with no affordable move is done at reset") {
  const auto inst = testing::grid_instance(3, 3, 4, 4, 1.0);
  const Episode ep(inst);
  CHECK(ep.done());
  CHECK(ep.succeeded());
  CHECK(ep.state().path == std::vector<VertexId>{4});
}

TEST_CASE("naive exploration strands and voids the return") {
  std::mt19937_64 rng(1);
  const auto inst = testing::grid_instance(3, 3, 4, 8, 2.0);
  int stranded = 0;
  for (int e = 0; e < 50; ++e) {
    Episode ep(inst, Exploration::Naive);
    double sum = 0;
    while (!ep.done()) sum += ep.step(ep.explore_action(rng)).reward;
    if (ep.state().penalized) {
      ++stranded;
      CHECK(sum == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    } else {
      CHECK(ep.succeeded());
    }
  }
  CHECK(stranded > 0);
}

TEST_CASE("exploration prefers unvisited vertices") {
  std::mt19937_64 rng(9);
  const auto inst = testing::line_instance(3, 0, 0, 4.0);
  for (int e = 0; e < 20; ++e) {
    Episode ep(inst);
    ep.step(1);
    CHECK(ep.explore_action(rng) == 2);
  }
}

TEST_CASE("explore_episode is deterministic given the seed") {
  const auto inst = testing::grid_instance(4, 4, 0, 15, 10.0);
  Rng a(42), b(42);
  const auto x = explore_episode(inst, a);
  const auto y = explore_episode(inst, b);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i].action == y[i].action);
  CHECK(x.back().done);
}

}  // TEST_SUITE
