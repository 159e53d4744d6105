#include <algorithm>
#include <chrono>
#include <limits>

#include "ipp/baselines.hpp"

namespace ipp {

std::vector<VertexId> tsp_order(const SpatialGraph& g, VertexId start, VertexId terminal,
                                std::vector<VertexId> stops) {
  std::vector<VertexId> route{start};
  VertexId cur = start;
  while (!stops.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < stops.size(); ++i)
      if (g.shortest_path_cost(cur, stops[i]) < g.shortest_path_cost(cur, stops[best])) best = i;
    cur = stops[best];
    route.push_back(cur);
    stops.erase(stops.begin() + static_cast<std::ptrdiff_t>(best));
  }
  route.push_back(terminal);

  auto d = [&](VertexId a, VertexId b) { return g.shortest_path_cost(a, b); };
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 1; i + 1 < route.size(); ++i) {
      for (std::size_t j = i + 1; j + 1 < route.size(); ++j) {
        const double before = d(route[i - 1], route[i]) + d(route[j], route[j + 1]);
        const double after = d(route[i - 1], route[j]) + d(route[i], route[j + 1]);
        if (after < before - 1e-12) {
          std::reverse(route.begin() + static_cast<std::ptrdiff_t>(i),
                       route.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
        }
      }
    }
  }
  return route;
}

std::vector<VertexId> expand_route(const SpatialGraph& g, const std::vector<VertexId>& stops) {
  std::vector<VertexId> walk;
  if (stops.empty()) return walk;
  walk.push_back(stops.front());
  for (std::size_t i = 1; i < stops.size(); ++i) {
    const auto leg = g.shortest_route(stops[i - 1], stops[i]);
    walk.insert(walk.end(), leg.begin() + 1, leg.end());
  }
  return walk;
}

PlanResult greedy_tsp(const ProblemInstance& inst) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& g = inst.graph();
  const double tol = budget_tolerance(inst.budget());
  const VertexId vs = inst.start();
  const VertexId vt = inst.terminal();
  long long evaluations = 0;

  std::vector<VertexId> selected;
  std::vector<VertexId> walk = expand_route(g, {vs, vt});
  if (vs == vt) walk = {vs};
  double walk_val = inst.reward(walk);
  double walk_cost = path_cost(g, walk);

  std::vector<char> chosen(g.size(), 0);
  chosen[static_cast<std::size_t>(vs)] = chosen[static_cast<std::size_t>(vt)] = 1;
  while (true) {
    double best_ratio = -std::numeric_limits<double>::infinity();
    std::vector<VertexId> best_walk;
    VertexId best_v = -1;
    double best_val = 0.0;
    for (VertexId v = 0; v < static_cast<VertexId>(g.size()); ++v) {
      if (chosen[static_cast<std::size_t>(v)]) continue;
      auto stops = selected;
      stops.push_back(v);
      auto cand = expand_route(g, tsp_order(g, vs, vt, stops));
      const double cost = path_cost(g, cand);
      if (cost > inst.budget() + tol || !ends_on_first_arrival(inst, cand)) continue;
      ++evaluations;
      const double val = inst.reward(cand);
      const double gain = val - walk_val;
      if (gain <= 1e-12) continue;
      const double ratio = gain / std::max(cost - walk_cost, 1e-9);
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best_walk = std::move(cand);
        best_v = v;
        best_val = val;
      }
    }
    if (best_v < 0) break;
    selected.push_back(best_v);
    chosen[static_cast<std::size_t>(best_v)] = 1;
    walk = std::move(best_walk);
    walk_val = best_val;
    walk_cost = path_cost(g, walk);
  }

  const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  PlanResult r = make_result(inst, "greedy", std::move(walk), el);
  r.evaluations = evaluations;
  return r;
}

}  // namespace ipp
