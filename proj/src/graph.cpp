#include "ipp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace ipp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double arc_tolerance(double arc) { return 1e-9 * std::max(1.0, std::abs(arc)); }

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_int(const std::string& s, long long& out) {
  try {
    std::size_t pos = 0;
    out = std::stoll(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

SpatialGraph::SpatialGraph(std::vector<Point2> positions, const std::vector<Edge>& edges)
    : positions_(std::move(positions)), adjacency_(positions_.size()) {
  if (positions_.empty()) throw InvalidArgument("graph must have at least one vertex");
  for (const auto& p : positions_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw InvalidArgument("vertex coordinates must be finite");
  }
  min_edge_cost_ = kInf;
  for (const auto& e : edges) {
    if (!contains(e.u) || !contains(e.v))
      throw InvalidArgument("edge references unknown vertex");
    if (e.u == e.v) throw InvalidArgument("self-loop on vertex " + std::to_string(e.u));
    if (!(e.cost > 0.0) || !std::isfinite(e.cost))
      throw InvalidArgument("edge cost must be positive and finite");
    if (adjacent(e.u, e.v))
      throw InvalidArgument("duplicate edge " + std::to_string(e.u) + "-" + std::to_string(e.v));
    adjacency_[e.u].push_back({e.v, e.cost});
    adjacency_[e.v].push_back({e.u, e.cost});
    min_edge_cost_ = std::min(min_edge_cost_, e.cost);
  }
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
  }
  if (edges.empty()) min_edge_cost_ = 0.0;
  compute_apsp();
}

std::size_t SpatialGraph::check(VertexId v) const {
  if (!contains(v)) throw InvalidArgument("unknown vertex id " + std::to_string(v));
  return static_cast<std::size_t>(v);
}

std::span<const Neighbor> SpatialGraph::neighbors(VertexId v) const {
  return adjacency_[check(v)];
}

bool SpatialGraph::adjacent(VertexId u, VertexId v) const {
  const auto& nbrs = adjacency_[check(u)];
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v,
                             [](const Neighbor& n, VertexId id) { return n.vertex < id; });
  return it != nbrs.end() && it->vertex == v;
}

double SpatialGraph::edge_cost(VertexId u, VertexId v) const {
  const auto& nbrs = adjacency_[check(u)];
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v,
                             [](const Neighbor& n, VertexId id) { return n.vertex < id; });
  if (it == nbrs.end() || it->vertex != v)
    throw InvalidPath("vertices " + std::to_string(u) + " and " + std::to_string(v) +
                      " are not adjacent");
  return it->cost;
}

std::vector<Edge> SpatialGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t u = 0; u < adjacency_.size(); ++u) {
    for (const auto& n : adjacency_[u]) {
      if (static_cast<std::size_t>(n.vertex) > u)
        out.push_back({static_cast<VertexId>(u), n.vertex, n.cost});
    }
  }
  return out;
}

void SpatialGraph::compute_apsp() {
  const std::size_t n = size();
  apsp_.assign(n * n, kInf);
  next_hop_.assign(n * n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    apsp_[i * n + i] = 0.0;
    next_hop_[i * n + i] = static_cast<VertexId>(i);
    for (const auto& nb : adjacency_[i]) {
      apsp_[i * n + nb.vertex] = nb.cost;
      next_hop_[i * n + nb.vertex] = nb.vertex;
    }
  }
  // Floyd-Warshall; strict improvement keeps the route choice deterministic.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = apsp_[i * n + k];
      if (dik == kInf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double cand = dik + apsp_[k * n + j];
        if (cand < apsp_[i * n + j]) {
          apsp_[i * n + j] = cand;
          next_hop_[i * n + j] = next_hop_[i * n + k];
        }
      }
    }
  }
  for (std::size_t j = 1; j < n; ++j) {
    if (apsp_[j] == kInf)
      throw InvalidArgument("graph is disconnected: vertex " + std::to_string(j) +
                            " is unreachable from vertex 0");
  }
  // Symmetrize rounding differences between the (i,j) and (j,i) relaxations.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double m = std::min(apsp_[i * n + j], apsp_[j * n + i]);
      apsp_[i * n + j] = apsp_[j * n + i] = m;
    }
}

double SpatialGraph::shortest_path_cost(VertexId u, VertexId v) const {
  return apsp_[check(u) * size() + check(v)];
}

std::vector<VertexId> SpatialGraph::shortest_route(VertexId u, VertexId v) const {
  const std::size_t n = size();
  std::vector<VertexId> route{u};
  VertexId cur = static_cast<VertexId>(check(u));
  check(v);
  while (cur != v) {
    cur = next_hop_[static_cast<std::size_t>(cur) * n + v];
    route.push_back(cur);
  }
  return route;
}

SpatialGraph build_grid_graph(double width_m, double height_m, double spacing) {
  if (!(width_m > 0.0) || !(height_m > 0.0) || !(spacing > 0.0))
    throw InvalidArgument("grid dimensions and spacing must be positive");
  if (spacing > std::min(width_m, height_m) + arc_tolerance(spacing))
    throw InvalidArgument("grid spacing exceeds the smaller area dimension");
  const int nx = static_cast<int>(std::floor(width_m / spacing + 1e-9)) + 1;
  const int ny = static_cast<int>(std::floor(height_m / spacing + 1e-9)) + 1;
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(nx * ny));
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) pts.push_back({ix * spacing, iy * spacing});
  std::vector<Edge> edges;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int id = iy * nx + ix;
      if (ix + 1 < nx) edges.push_back({id, id + 1, spacing});
      if (iy + 1 < ny) edges.push_back({id, id + nx, spacing});
    }
  }
  return SpatialGraph(std::move(pts), edges);
}

SpatialGraph load_graph(std::string_view source) {
  std::map<long long, std::pair<Point2, int>> verts;
  struct PendingEdge {
    long long u, v;
    double cost;
    int line;
  };
  std::vector<PendingEdge> pending;
  std::istringstream in{std::string(source)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "V") {
      long long id = 0;
      Point2 p;
      if (tok.size() != 4 || !parse_int(tok[1], id) || !parse_double(tok[2], p.x) ||
          !parse_double(tok[3], p.y))
        throw LoadError("malformed vertex record, expected 'V <id> <x> <y>'", lineno);
      if (id < 0) throw LoadError("vertex id must be non-negative", lineno);
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw LoadError("vertex coordinates must be finite", lineno);
      if (!verts.emplace(id, std::make_pair(p, lineno)).second)
        throw LoadError("duplicate vertex id " + std::to_string(id), lineno);
    } else if (tok[0] == "E") {
      PendingEdge e{0, 0, 0.0, lineno};
      if (tok.size() != 4 || !parse_int(tok[1], e.u) || !parse_int(tok[2], e.v) ||
          !parse_double(tok[3], e.cost))
        throw LoadError("malformed edge record, expected 'E <u> <v> <cost>'", lineno);
      if (!(e.cost > 0.0) || !std::isfinite(e.cost))
        throw LoadError("edge cost must be positive and finite", lineno);
      if (e.u == e.v) throw LoadError("self-loop edge", lineno);
      pending.push_back(e);
    } else {
      throw LoadError("unknown record type '" + tok[0] + "'", lineno);
    }
  }
  if (verts.empty()) throw LoadError("graph has no vertices");
  std::vector<Point2> positions(verts.size());
  long long expected = 0;
  for (const auto& [id, rec] : verts) {
    if (id != expected)
      throw LoadError("vertex ids must be contiguous from 0; missing id " +
                          std::to_string(expected),
                      rec.second);
    positions[static_cast<std::size_t>(id)] = rec.first;
    ++expected;
  }
  std::vector<Edge> edges;
  std::map<std::pair<long long, long long>, int> seen;
  for (const auto& e : pending) {
    if (!verts.count(e.u) || !verts.count(e.v))
      throw LoadError("edge references undefined vertex", e.line);
    auto key = std::minmax(e.u, e.v);
    if (!seen.emplace(key, e.line).second) throw LoadError("duplicate edge", e.line);
    edges.push_back({static_cast<VertexId>(e.u), static_cast<VertexId>(e.v), e.cost});
  }
  try {
    return SpatialGraph(std::move(positions), edges);
  } catch (const InvalidArgument& err) {
    throw LoadError(err.what());
  }
}

SpatialGraph load_graph_file(const std::string& filename) {
  std::ifstream f(filename);
  if (!f) throw LoadError("cannot open graph file '" + filename + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return load_graph(ss.str());
}

std::string format_graph(const SpatialGraph& g) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& p = g.position(static_cast<VertexId>(i));
    os << "V " << i << ' ' << p.x << ' ' << p.y << '\n';
  }
  for (const auto& e : g.edges()) os << "E " << e.u << ' ' << e.v << ' ' << e.cost << '\n';
  return os.str();
}

double path_cost(const SpatialGraph& g, std::span<const VertexId> path) {
  if (path.empty()) throw InvalidPath("empty path");
  for (VertexId v : path) {
    if (!g.contains(v)) throw InvalidPath("unknown vertex id " + std::to_string(v));
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!g.adjacent(path[i], path[i + 1]))
      throw InvalidPath("step " + std::to_string(i) + ": vertices " + std::to_string(path[i]) +
                        " and " + std::to_string(path[i + 1]) + " are not adjacent");
    total += g.edge_cost(path[i], path[i + 1]);
  }
  return total;
}

Path make_path(const SpatialGraph& g, std::vector<VertexId> vertices) {
  const double c = path_cost(g, vertices);
  return Path{std::move(vertices), c};
}

double append_edge_samples(const SpatialGraph& g, VertexId from, VertexId to, double start_arc,
                           double spacing, std::vector<Point2>& out) {
  const double cost = g.edge_cost(from, to);
  const double end_arc = start_arc + cost;
  const double lo = start_arc + arc_tolerance(start_arc);
  const double hi = end_arc + arc_tolerance(end_arc);
  auto k = static_cast<long long>(std::floor(lo / spacing));
  while (static_cast<double>(k) * spacing <= lo) ++k;
  while (k > 1 && static_cast<double>(k - 1) * spacing > lo) --k;
  const Point2 a = g.position(from);
  const Point2 b = g.position(to);
  for (; static_cast<double>(k) * spacing <= hi; ++k) {
    const double t = std::clamp((static_cast<double>(k) * spacing - start_arc) / cost, 0.0, 1.0);
    out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }
  return end_arc;
}

std::vector<Point2> sample_points_along_path(const SpatialGraph& g,
                                             std::span<const VertexId> path, double spacing) {
  if (!(spacing > 0.0)) throw InvalidArgument("sample spacing must be positive");
  if (path.empty()) throw InvalidPath("empty path");
  std::vector<Point2> out{g.position(path.front())};
  double arc = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    arc = append_edge_samples(g, path[i], path[i + 1], arc, spacing, out);
  return out;
}

double shortest_path_cost(const SpatialGraph& g, VertexId u, VertexId v) {
  return g.shortest_path_cost(u, v);
}

std::string format_path(const Path& p) {
  std::ostringstream os;
  os << std::setprecision(17) << "cost " << p.cost << "\nvertices";
  for (VertexId v : p.vertices) os << ' ' << v;
  os << '\n';
  return os.str();
}

Path parse_path(std::string_view text) {
  Path p;
  bool have_cost = false, have_vertices = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "cost" && tok.size() == 2 && parse_double(tok[1], p.cost)) {
      have_cost = true;
    } else if (tok[0] == "vertices") {
      for (std::size_t i = 1; i < tok.size(); ++i) {
        long long v = 0;
        if (!parse_int(tok[i], v)) throw LoadError("bad vertex id '" + tok[i] + "'", lineno);
        p.vertices.push_back(static_cast<VertexId>(v));
      }
      have_vertices = true;
    } else {
      throw LoadError("unrecognized path record", lineno);
    }
  }
  if (!have_cost || !have_vertices || p.vertices.empty())
    throw LoadError("path file needs 'cost' and non-empty 'vertices' records");
  return p;
}

}  // namespace ipp
