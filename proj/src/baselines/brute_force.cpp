#include <chrono>

#include "ipp/baselines.hpp"

namespace ipp {

bool ends_on_first_arrival(const ProblemInstance& inst, std::span<const VertexId> path) {
  if (path.empty() || path.back() != inst.terminal()) return false;
  for (std::size_t i = 1; i + 1 < path.size(); ++i)
    if (path[i] == inst.terminal()) return false;
  return true;
}

PlanResult make_result(const ProblemInstance& inst, std::string solver,
                       std::vector<VertexId> path, double wall_time_s) {
  PlanResult r;
  r.solver = std::move(solver);
  r.budget = inst.budget();
  r.start = inst.start();
  r.terminal = inst.terminal();
  r.wall_time_s = wall_time_s;
  if (!path.empty()) {
    r.cost = path_cost(inst.graph(), path);
    r.mi_total = inst.reward(path);
    r.mi_gain_over_pilot = r.mi_total - inst.start_reward();
    r.valid = inst.is_valid(path);
    r.path = std::move(path);
  }
  return r;
}

namespace {

struct Frame {
  std::vector<VertexId> path;
  double remaining;
  double arc;
  MiEvaluator evaluator;
};

template <typename OnLeaf>
bool enumerate(const ProblemInstance& inst, const BruteForceOptions& options, OnLeaf&& on_leaf,
               bool need_reward) {
  const auto& g = inst.graph();
  const auto t0 = std::chrono::steady_clock::now();
  const double tol = budget_tolerance(inst.budget());
  const VertexId vt = inst.terminal();

  std::vector<Frame> stack;
  stack.push_back({{inst.start()}, inst.budget(), 0.0, inst.start_evaluator()});
  bool any_move = false;
  long long iterations = 0;
  while (!stack.empty()) {
    if (options.time_limit_s > 0.0 && (++iterations & 255) == 0) {
      const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (el > options.time_limit_s) return false;
    }
    Frame f = std::move(stack.back());
    stack.pop_back();
    const VertexId cur = f.path.back();
    if (f.path.size() > 1 && cur == vt) {
      on_leaf(f);
      continue;
    }
    const auto nbrs = g.neighbors(cur);
    // Reverse push keeps lowest-id children on top of the stack.
    for (auto it = nbrs.rbegin(); it != nbrs.rend(); ++it) {
      const double rem = f.remaining - it->cost;
      if (rem + tol < g.shortest_path_cost(it->vertex, vt)) continue;
      any_move = true;
      Frame child{f.path, rem, 0.0, need_reward ? f.evaluator : inst.start_evaluator()};
      child.path.push_back(it->vertex);
      if (need_reward) {
        std::vector<Point2> extra;
        child.arc = append_edge_samples(g, cur, it->vertex, f.arc, inst.spacing(), extra);
        child.evaluator.append(extra);
      }
      stack.push_back(std::move(child));
    }
  }
  // A tour with no feasible move: the single-vertex walk is the only path.
  if (!any_move && inst.start() == vt) {
    Frame f{{inst.start()}, inst.budget(), 0.0, inst.start_evaluator()};
    on_leaf(f);
  }
  return true;
}

}  // namespace

PlanResult brute_force(const ProblemInstance& inst, const BruteForceOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<VertexId> best;
  double best_val = 0.0;
  long long count = 0;
  const bool complete = enumerate(
      inst, options,
      [&](const Frame& f) {
        ++count;
        const double v = f.evaluator.mutual_information();
        if (best.empty() || v > best_val) {
          best_val = v;
          best = f.path;
        }
      },
      true);
  const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  PlanResult r = make_result(inst, "brute", std::move(best), el);
  r.complete = complete;
  r.evaluations = count;
  return r;
}

long long count_paths(const ProblemInstance& inst) {
  long long count = 0;
  enumerate(inst, BruteForceOptions{}, [&](const Frame&) { ++count; }, false);
  return count;
}

}  // namespace ipp
