#include <chrono>
#include <cmath>

#include "ipp/baselines.hpp"

namespace ipp {

namespace {

using Walk = std::vector<VertexId>;

class RecursiveGreedy {
 public:
  RecursiveGreedy(const ProblemInstance& inst, double step)
      : inst_(inst), g_(inst.graph()), step_(step), tol_(budget_tolerance(inst.budget())) {}

  std::optional<Walk> solve(VertexId s, VertexId t, double budget, const MiEvaluator& x, int depth) {
    if (g_.shortest_path_cost(s, t) > budget + tol_) return std::nullopt;
    std::optional<Walk> best;
    if (depth >= 2) {
      best = solve(s, t, budget, x, depth - 1);
    } else {
      Walk sp = g_.shortest_route(s, t);
      if (segment_ok(sp, t)) best = std::move(sp);
    }
    if (depth == 0) return best;
    double best_val = best ? value(*best, x) : 0.0;

    const VertexId vt = inst_.terminal();
    const int n = static_cast<int>(g_.size());
    for (VertexId v = 0; v < n; ++v) {
      if (v == s || v == t || v == vt) continue;
      const double to_v = g_.shortest_path_cost(s, v);
      const double from_v = g_.shortest_path_cost(v, t);
      if (to_v + from_v > budget + tol_) continue;
      const int k_min = std::max(1, static_cast<int>(std::ceil((to_v - tol_) / step_)));
      const int k_max = static_cast<int>(std::floor((budget - from_v + tol_) / step_));
      for (int k = k_min; k <= k_max; ++k) {
        const double b1 = k * step_;
        auto left = solve(s, v, b1, x, depth - 1);
        if (left) {
          MiEvaluator xl = x;
          xl.append(sample_points_along_path(g_, *left, inst_.spacing()));
          auto right = solve(v, t, budget - b1, xl, depth - 1);
          if (right) {
            Walk cand = *left;
            cand.insert(cand.end(), right->begin() + 1, right->end());
            if (segment_ok(cand, t) && path_cost(g_, cand) <= budget + tol_) {
              const double val = value(cand, x);
              if (!best || val > best_val) {
                best_val = val;
                best = std::move(cand);
              }
            }
          }
        }
        // Shortest-route halves do not depend on the split.
        if (depth == 1) break;
      }
    }
    return best;
  }

  long long evaluations() const { return evaluations_; }

 private:
  // v_t may only close the overall walk.
  bool segment_ok(const Walk& w, VertexId t) const {
    const VertexId vt = inst_.terminal();
    for (std::size_t i = 1; i < w.size(); ++i)
      if (w[i] == vt && !(i + 1 == w.size() && t == vt)) return false;
    return true;
  }

  double value(const Walk& w, const MiEvaluator& x) {
    ++evaluations_;
    MiEvaluator e = x;
    e.append(sample_points_along_path(g_, w, inst_.spacing()));
    return e.mutual_information();
  }

  const ProblemInstance& inst_;
  const SpatialGraph& g_;
  double step_;
  double tol_;
  long long evaluations_ = 0;
};

}  // namespace

PlanResult recursive_greedy(const ProblemInstance& inst, const RgConfig& cfg) {
  if (cfg.depth < 0) throw InvalidArgument("recursive greedy depth must be >= 0");
  const double step = cfg.budget_step > 0.0 ? cfg.budget_step : inst.graph().min_edge_cost();
  const auto t0 = std::chrono::steady_clock::now();
  RecursiveGreedy rg(inst, step);
  const MiEvaluator pilot_only(inst.model());
  auto walk = rg.solve(inst.start(), inst.terminal(), inst.budget(), pilot_only, cfg.depth);
  const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  PlanResult r = make_result(inst, "rg" + std::to_string(cfg.depth), walk ? *walk : Walk{}, el);
  r.evaluations = rg.evaluations();
  return r;
}

}  // namespace ipp
