#pragma once

#include <cstdint>
#include <memory>
#include <utility>

#include "ipp/env.hpp"
#include "ipp/gp.hpp"
#include "ipp/graph.hpp"

namespace ipp {

/// Ground truth drawn from the GP prior; pilot values carry observation noise.
struct SyntheticField {
  KernelParams params{1.0, 2.0, 0.01};
  int count = 30;
  double mean = 0.0;
  std::uint64_t seed = 0;
};

/// `count` pilot points placed uniformly in the box [lo, hi].
PilotData synthesize_pilot(const SyntheticField& field, Point2 lo, Point2 hi);

/// Axis-aligned bounds of the vertex positions.
std::pair<Point2, Point2> bounding_box(const SpatialGraph& g);

/// Grid graph of cols x rows vertices with a synthetic-field pilot over its extent.
ProblemInstance make_grid_instance(int cols, int rows, double spacing, const SyntheticField& field,
                                   VertexId start, VertexId terminal, double budget,
                                   double sample_spacing = 1.0);

/// Model and instance over an existing graph with the given pilot data.
ProblemInstance make_instance(std::shared_ptr<const SpatialGraph> graph, const KernelParams& params,
                              PilotData pilot, VertexId start, VertexId terminal, double budget,
                              double sample_spacing = 1.0);

}  // namespace ipp
