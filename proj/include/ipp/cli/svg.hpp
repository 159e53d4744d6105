#pragma once

#include <span>
#include <string>
#include <vector>

#include "ipp/graph.hpp"

namespace ipp::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  /// Optional band drawn behind the line; same length as `x` when present.
  std::vector<double> lo;
  std::vector<double> hi;
  bool dashed = false;
};

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series);

/// Graph edges in grey, vertices shaded by `vertex_values` (low = light), and
/// the path drawn edge by edge as `<line class="path" data-from=.. data-to=..>`.
std::string path_overlay(const std::string& title, const SpatialGraph& g,
                         std::span<const double> vertex_values, std::span<const VertexId> path);

}  // namespace ipp::cli
