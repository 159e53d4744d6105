#include <algorithm>
#include <functional>
#include <memory>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ipp/baselines.hpp"
#include "ipp/errors.hpp"
#include "ipp/qlearn.hpp"

using namespace ipp;

namespace {

// Plain recursion over walks, without the shortest-path pruning used by the solver.
std::vector<std::vector<VertexId>> all_walks(const ProblemInstance& inst) {
  const auto& g = inst.graph();
  const double tol = budget_tolerance(inst.budget());
  std::vector<std::vector<VertexId>> out;
  std::vector<VertexId> path{inst.start()};
  std::function<void(double)> go = [&](double rem) {
    for (const auto& n : g.neighbors(path.back())) {
      if (n.cost > rem + tol) continue;
      path.push_back(n.vertex);
      if (n.vertex == inst.terminal())
        out.push_back(path);
      else
        go(rem - n.cost);
      path.pop_back();
    }
  };
  go(inst.budget());
  if (out.empty() && inst.start() == inst.terminal()) out.push_back({inst.start()});
  return out;
}

ProblemInstance random_instance(std::mt19937_64& rng, int n, int extra) {
  auto g = std::make_shared<const SpatialGraph>(testing::random_graph(rng, n, extra));
  while (g->min_edge_cost() < 1.5)
    g = std::make_shared<const SpatialGraph>(testing::random_graph(rng, n, extra));
  const auto [lo, hi] = bounding_box(*g);
  SyntheticField f;
  f.count = 6;
  f.seed = rng();
  f.params.lengthscale = 3.0;
  const auto s = static_cast<VertexId>(rng() % n);
  const auto t = rng() % 3 == 0 ? s : static_cast<VertexId>(rng() % n);
  const double sp = g->shortest_path_cost(s, t);
  const double budget = sp + 2.0 + 6.0 * std::uniform_real_distribution<double>(0, 1)(rng);
  return make_instance(g, f.params, synthesize_pilot(f, lo, hi), s, t, budget);
}

void check_output(const ProblemInstance& inst, const PlanResult& r) {
  INFO(r.solver);
  REQUIRE(r.valid);
  CHECK(inst.is_valid(r.path));
  CHECK(ends_on_first_arrival(inst, r.path));
  CHECK(r.mi_total == doctest::Approx(inst.reward(r.path)).epsilon(1e-12));
  CHECK(r.cost <= inst.budget() + 1e-9);
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("path count on a small tour matches a hand count") {
  // Closed walks from a corner of a 3x3 grid with at most four unit moves:
  // two out-and-back walks plus three first returns of length four per side.
  const auto inst = testing::grid_instance(3, 3, 0, 0, 4.0);
  CHECK(count_paths(inst) == 8);
  CHECK(all_walks(inst).size() == 8);
}

TEST_CASE("enumeration agrees with unpruned recursion on random graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const auto inst = random_instance(rng, 5 + static_cast<int>(rng() % 3), 3);
    const auto walks = all_walks(inst);
    INFO("trial " << trial);
    CHECK(count_paths(inst) == static_cast<long long>(walks.size()));
    const auto bf = brute_force(inst);
    CHECK(bf.complete);
    CHECK(bf.evaluations == static_cast<long long>(walks.size()));
    double best = -1;
    for (const auto& w : walks) best = std::max(best, inst.reward(w));
    CHECK(bf.mi_total == doctest::Approx(best).epsilon(1e-12));
    check_output(inst, bf);
  }
}

TEST_CASE("brute force dominates every other solver") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    const int cols = 3 + trial % 2;
    const auto vt = static_cast<VertexId>(rng() % (cols * 3));
    const double budget = static_cast<double>(vt % cols + vt / cols) + 2.0 + static_cast<double>(rng() % 3);
    const auto inst = testing::grid_instance(cols, 3, 0, vt, budget, 100 + trial);
    const auto bf = brute_force(inst);
    check_output(inst, bf);
    TrainingConfig tc;
    tc.episodes = 100;
    tc.hidden = 8;
    tc.seed = static_cast<std::uint64_t>(trial);
    GaConfig gc;
    gc.population = 20;
    gc.generations = 5;
    gc.seed = static_cast<std::uint64_t>(trial);
    const PlanResult others[] = {greedy_tsp(inst), genetic(inst, gc), recursive_greedy(inst),
                                 recursive_greedy(inst, {1, 0.0}), train(inst, tc)};
    for (const auto& r : others) {
      check_output(inst, r);
      CHECK(r.mi_total <= bf.mi_total + 1e-9);
    }
  }
}

TEST_CASE("tsp_order keeps the endpoints and visits every stop once") {
  const auto g = testing::line_instance(5, 0, 4, 4.0).graph();
  CHECK(tsp_order(g, 0, 4, {3, 1, 2}) == std::vector<VertexId>{0, 1, 2, 3, 4});
  CHECK(tsp_order(g, 0, 4, {}) == std::vector<VertexId>{0, 4});

  std::mt19937_64 rng(2);
  const auto grid = build_grid_graph(4.0, 4.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<VertexId> stops;
    for (int k = 0; k < 6; ++k) stops.push_back(static_cast<VertexId>(1 + rng() % 23));
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    const auto order = tsp_order(grid, 0, 24, stops);
    CHECK(order.front() == 0);
    CHECK(order.back() == 24);
    std::vector<VertexId> mid(order.begin() + 1, order.end() - 1);
    std::sort(mid.begin(), mid.end());
    CHECK(mid == stops);
    // 2-opt leaves no improving segment reversal.
    auto cost = [&](const std::vector<VertexId>& o) {
      double c = 0;
      for (std::size_t i = 1; i < o.size(); ++i) c += grid.shortest_path_cost(o[i - 1], o[i]);
      return c;
    };
    const double base = cost(order);
    for (std::size_t i = 1; i + 1 < order.size(); ++i)
      for (std::size_t j = i + 1; j + 1 < order.size(); ++j) {
        auto r = order;
        std::reverse(r.begin() + static_cast<std::ptrdiff_t>(i), r.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        CHECK(cost(r) >= base - 1e-9);
      }
    const auto route = expand_route(grid, order);
    CHECK(path_cost(grid, route) == doctest::Approx(base));
  }
}

TEST_CASE("recursive greedy depth ordering") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto inst = testing::grid_instance(4, 3, 0, 11, 9.0, seed);
    const auto r0 = recursive_greedy(inst, {0, 0.0});
    CHECK(r0.path == inst.graph().shortest_route(0, 11));
    const auto r1 = recursive_greedy(inst, {1, 0.0});
    const auto r2 = recursive_greedy(inst, {2, 0.0});
    CHECK(r0.solver == "rg0");
    CHECK(r2.solver == "rg2");
    check_output(inst, r1);
    check_output(inst, r2);
    CHECK(r1.mi_total >= r0.mi_total - 1e-12);
    CHECK(r2.mi_total >= r1.mi_total - 1e-12);
  }
  const auto inst = testing::grid_instance(3, 3, 0, 8, 4.0);
  CHECK_THROWS_AS(recursive_greedy(inst, {-1, 0.0}), InvalidArgument);
}

TEST_CASE("greedy on a tour improves on staying put") {
  const auto inst = testing::grid_instance(4, 4, 5, 5, 8.0);
  const auto r = greedy_tsp(inst);
  check_output(inst, r);
  CHECK(r.mi_total > inst.start_reward());
}

TEST_CASE("genetic algorithm is deterministic and counts trials") {
  const auto inst = testing::grid_instance(4, 4, 0, 15, 10.0);
  GaConfig c;
  c.population = 30;
  c.generations = 8;
  c.seed = 3;
  const auto a = genetic(inst, c);
  const auto b = genetic(inst, c);
  CHECK(a.path == b.path);
  CHECK(a.mi_total == b.mi_total);
  CHECK(a.evaluations == 240);
  CHECK(a.seed == 3);
  check_output(inst, a);

  GaConfig bad;
  bad.population = 1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = GaConfig{};
  bad.mutation_probability = 1.5;
  CHECK_THROWS_AS(genetic(inst, bad), InvalidArgument);
}

TEST_CASE("brute force reports an incomplete search at the time limit") {
  const auto inst = testing::grid_instance(5, 5, 12, 12, 16.0);
  const auto r = brute_force(inst, {1e-3});
  CHECK_FALSE(r.complete);
  if (!r.path.empty()) CHECK(r.valid);
}

TEST_CASE("make_result fields") {
  const auto inst = testing::grid_instance(3, 3, 0, 8, 6.0);
  const std::vector<VertexId> p{0, 1, 2, 5, 8};
  const auto r = make_result(inst, "x", p, 0.5);
  CHECK(r.valid);
  CHECK(r.cost == 4.0);
  CHECK(r.mi_gain_over_pilot == doctest::Approx(r.mi_total - inst.start_reward()));
  CHECK(r.mi_gain_over_pilot > 0.0);
  CHECK(r.budget == 6.0);
  CHECK(r.terminal == 8);
  const auto empty = make_result(inst, "x", {}, 0.0);
  CHECK_FALSE(empty.valid);
  CHECK(empty.mi_total == 0.0);

  CHECK(ends_on_first_arrival(inst, std::vector<VertexId>{0, 1, 2, 5, 8}));
  CHECK_FALSE(ends_on_first_arrival(inst, std::vector<VertexId>{0, 3, 4, 5, 8, 5, 8}));
  const auto tour = inst.with(0, 0, 6.0);
  CHECK(ends_on_first_arrival(tour, std::vector<VertexId>{0, 1, 0}));
  CHECK_FALSE(ends_on_first_arrival(tour, std::vector<VertexId>{0, 1, 0, 1, 0}));
}

}  // TEST_SUITE
