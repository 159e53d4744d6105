#pragma once

#include <memory>
#include <random>
#include <vector>

#include "ipp/env.hpp"
#include "ipp/synthetic.hpp"

namespace testing {

inline ipp::ProblemInstance grid_instance(int cols, int rows, ipp::VertexId start,
                                          ipp::VertexId terminal, double budget,
                                          std::uint64_t seed = 1, int pilot = 8) {
  ipp::SyntheticField f;
  f.seed = seed;
  f.count = pilot;
  return ipp::make_grid_instance(cols, rows, 1.0, f, start, terminal, budget);
}

/// n vertices on a unit-spaced line.
inline ipp::ProblemInstance line_instance(int n, ipp::VertexId start, ipp::VertexId terminal,
                                          double budget, std::uint64_t seed = 1) {
  std::vector<ipp::Point2> pos;
  std::vector<ipp::Edge> edges;
  for (int i = 0; i < n; ++i) {
    pos.push_back({static_cast<double>(i), 0.0});
    if (i > 0) edges.push_back({i - 1, i, 1.0});
  }
  auto g = std::make_shared<const ipp::SpatialGraph>(pos, edges);
  ipp::SyntheticField f;
  f.seed = seed;
  f.count = 4;
  const auto [lo, hi] = ipp::bounding_box(*g);
  return ipp::make_instance(g, f.params, ipp::synthesize_pilot(f, lo, hi), start, terminal, budget);
}

/// Connected graph with random positions: a random spanning tree plus extra edges,
/// costs at least the Euclidean distance.
inline ipp::SpatialGraph random_graph(std::mt19937_64& rng, int n, int extra) {
  std::uniform_real_distribution<double> u(0.0, 10.0), stretch(1.0, 1.5);
  std::vector<ipp::Point2> pos;
  for (int i = 0; i < n; ++i) pos.push_back({u(rng), u(rng)});
  std::vector<ipp::Edge> edges;
  std::vector<std::vector<char>> has(n, std::vector<char>(n, 0));
  auto add = [&](int a, int b) {
    if (a == b || has[a][b]) return;
    has[a][b] = has[b][a] = 1;
    const double d = std::hypot(pos[a].x - pos[b].x, pos[a].y - pos[b].y);
    edges.push_back({a, b, std::max(1e-3, d * stretch(rng))});
  };
  for (int i = 1; i < n; ++i) add(i, std::uniform_int_distribution<int>(0, i - 1)(rng));
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int k = 0; k < extra; ++k) add(pick(rng), pick(rng));
  return ipp::SpatialGraph(pos, edges);
}

}  // namespace testing
