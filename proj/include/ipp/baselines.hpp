#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ipp/env.hpp"
#include "ipp/plan_result.hpp"

namespace ipp {

struct BruteForceOptions {
  /// Wall-clock limit in seconds; <= 0 means unlimited.
  double time_limit_s = 0.0;
};

/// Depth-first enumeration of every walk from v_s that ends on its first
/// arrival at v_t, pruning branches that can no longer reach v_t within the
/// remaining budget. `complete` is false when the time limit cut the search.
PlanResult brute_force(const ProblemInstance& inst, const BruteForceOptions& options = {});

/// Number of walks brute_force enumerates (no reward evaluation).
long long count_paths(const ProblemInstance& inst);

struct RgConfig {
  int depth = 2;
  /// Budget split granularity in meters; <= 0 selects the minimum edge cost.
  double budget_step = 0.0;
};

/// Recursive greedy over (intermediate vertex, budget split) pairs; the right
/// half of every split is planned conditioned on the left half's samples.
PlanResult recursive_greedy(const ProblemInstance& inst, const RgConfig& cfg = {});

/// Marginal-gain/cost greedy vertex selection with a nearest-neighbor + 2-opt
/// route through the selected vertices on the shortest-path metric closure.
PlanResult greedy_tsp(const ProblemInstance& inst);

/// Orders `stops` into a route v_s -> ... -> v_t minimizing shortest-path cost
/// heuristically (nearest neighbor, then 2-opt). Endpoints are fixed.
std::vector<VertexId> tsp_order(const SpatialGraph& g, VertexId start, VertexId terminal,
                                std::vector<VertexId> stops);
/// Concatenates shortest routes between consecutive stops.
std::vector<VertexId> expand_route(const SpatialGraph& g, const std::vector<VertexId>& stops);

struct GaConfig {
  int population = 100;
  /// Populations evaluated, counting the initial one; trials = population * generations.
  int generations = 50;
  double crossover_probability = 0.8;
  double mutation_probability = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Genetic algorithm over valid walks: binary tournament selection, common-vertex
/// suffix crossover with shortest-path repair, random-suffix mutation, elitism.
PlanResult genetic(const ProblemInstance& inst, const GaConfig& cfg = {});

/// True when v_t occurs only as the final vertex (and as the first one for tours).
bool ends_on_first_arrival(const ProblemInstance& inst, std::span<const VertexId> path);

/// Fills cost, MI and validity fields for a solver's chosen path.
PlanResult make_result(const ProblemInstance& inst, std::string solver,
                       std::vector<VertexId> path, double wall_time_s);

}  // namespace ipp
