#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipp/errors.hpp"

namespace ipp {

using VertexId = int;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Edge {
  VertexId u = 0;
  VertexId v = 0;
  double cost = 0.0;
};

struct Neighbor {
  VertexId vertex = 0;
  double cost = 0.0;
};

/// Undirected weighted graph over 2D way-points with all-pairs shortest-path
/// costs precomputed at construction. Immutable once built.
class SpatialGraph {
 public:
  /// Vertex ids are the indices of `positions`. Each edge is inserted in both
  /// directions. Throws InvalidArgument on bad costs, duplicate edges or a
  /// disconnected graph.
  SpatialGraph(std::vector<Point2> positions, const std::vector<Edge>& edges);

  std::size_t size() const { return positions_.size(); }
  const Point2& position(VertexId v) const { return positions_.at(check(v)); }
  const std::vector<Point2>& positions() const { return positions_; }

  /// Sorted by neighbor id.
  std::span<const Neighbor> neighbors(VertexId v) const;
  bool adjacent(VertexId u, VertexId v) const;
  /// Cost of edge (u, v); throws InvalidPath when the vertices are not adjacent.
  double edge_cost(VertexId u, VertexId v) const;
  double min_edge_cost() const { return min_edge_cost_; }
  std::vector<Edge> edges() const;

  double shortest_path_cost(VertexId u, VertexId v) const;
  /// Vertex sequence of one least-cost route from u to v (inclusive).
  std::vector<VertexId> shortest_route(VertexId u, VertexId v) const;

  bool contains(VertexId v) const { return v >= 0 && static_cast<std::size_t>(v) < size(); }

 private:
  std::size_t check(VertexId v) const;
  void compute_apsp();

  std::vector<Point2> positions_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> apsp_;         // row-major |V|x|V|
  std::vector<VertexId> next_hop_;   // row-major |V|x|V|
  double min_edge_cost_ = 0.0;
};

/// A walk through the graph; repeated vertices are allowed.
struct Path {
  std::vector<VertexId> vertices;
  double cost = 0.0;
};

/// 4-connected grid over [0, width] x [0, height]; ids are row-major with x
/// varying fastest.
SpatialGraph build_grid_graph(double width_m, double height_m, double spacing);

/// Parses the line-oriented graph format (`V <id> <x> <y>`, `E <u> <v> <cost>`,
/// `#` comments). Vertex ids must be 0..n-1 in any order.
SpatialGraph load_graph(std::string_view source);
SpatialGraph load_graph_file(const std::string& filename);
std::string format_graph(const SpatialGraph& g);

double path_cost(const SpatialGraph& g, std::span<const VertexId> path);
Path make_path(const SpatialGraph& g, std::vector<VertexId> vertices);

/// Appends the samples that lie on edge (from -> to) whose arc length from the
/// path start falls in (start_arc, start_arc + edge cost]. The start point
/// itself is never emitted here. Returns the arc length at the edge end.
double append_edge_samples(const SpatialGraph& g, VertexId from, VertexId to,
                           double start_arc, double spacing,
                           std::vector<Point2>& out);

/// Points every `spacing` meters of arc length, starting at the first vertex.
/// Count is floor(length / spacing) + 1.
std::vector<Point2> sample_points_along_path(const SpatialGraph& g,
                                             std::span<const VertexId> path,
                                             double spacing);

double shortest_path_cost(const SpatialGraph& g, VertexId u, VertexId v);

/// Path file: `cost <c>` and `vertices <id>...` lines.
std::string format_path(const Path& p);
Path parse_path(std::string_view text);

}  // namespace ipp
