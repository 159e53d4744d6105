#pragma once

#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "ipp/gp.hpp"
#include "ipp/graph.hpp"

namespace ipp {

using Rng = std::mt19937_64;

/// <G, v_s, v_t, f_D, B> plus the sampling interval.
class ProblemInstance {
 public:
  /// Throws InvalidArgument when the terminal is unreachable within the budget.
  ProblemInstance(std::shared_ptr<const SpatialGraph> graph, std::shared_ptr<const GpModel> model,
                  VertexId start, VertexId terminal, double budget, double spacing = 1.0);

  const SpatialGraph& graph() const { return *graph_; }
  const GpModel& model() const { return *model_; }
  std::shared_ptr<const SpatialGraph> graph_ptr() const { return graph_; }
  std::shared_ptr<const GpModel> model_ptr() const { return model_; }
  VertexId start() const { return start_; }
  VertexId terminal() const { return terminal_; }
  double budget() const { return budget_; }
  double spacing() const { return spacing_; }

  /// f_D([v_s]).
  double start_reward() const { return start_reward_; }
  /// Evaluator conditioned on pilot data and the start sample.
  const MiEvaluator& start_evaluator() const { return *start_eval_; }
  /// Safety cap on episode length: 4 * ceil(B / min edge cost).
  int step_cap() const;

  /// Same graph and model with different endpoints or budget.
  ProblemInstance with(VertexId start, VertexId terminal, double budget) const;

  /// f_D of an arbitrary vertex sequence.
  double reward(std::span<const VertexId> path) const;
  /// A path is valid when it starts at v_s, ends at v_t, follows edges and costs at most B.
  bool is_valid(std::span<const VertexId> path) const;

 private:
  std::shared_ptr<const SpatialGraph> graph_;
  std::shared_ptr<const GpModel> model_;
  VertexId start_;
  VertexId terminal_;
  double budget_;
  double spacing_;
  double start_reward_ = 0.0;
  std::shared_ptr<const MiEvaluator> start_eval_;
};

/// Budget slack used in every feasibility comparison, absorbing rounding in
/// accumulated edge costs.
inline double budget_tolerance(double budget) { return 1e-9 * std::max(1.0, budget); }

struct EpisodeState {
  std::vector<VertexId> path;
  double remaining_budget = 0.0;
  double cumulative_reward = 0.0;
  bool done = false;
  bool penalized = false;

  VertexId current() const { return path.back(); }
};

struct Transition {
  EpisodeState state;
  VertexId action = 0;
  double reward = 0.0;
  EpisodeState next;
  bool done = false;
};

enum class Exploration {
  /// Shortest-path lookahead: only actions that can still reach v_t within budget.
  Constrained,
  /// Ablation: any affordable neighbor; the episode ends when the budget runs out.
  Naive,
};

/// One live episode: the MDP state plus the cached reward factorization.
class Episode {
 public:
  explicit Episode(const ProblemInstance& inst, Exploration mode = Exploration::Constrained);

  const EpisodeState& state() const { return state_; }
  const ProblemInstance& instance() const { return *inst_; }
  Exploration mode() const { return mode_; }
  bool done() const { return state_.done; }
  /// Ended at v_t without penalty.
  bool succeeded() const;
  /// f_D of the current partial path.
  double path_reward() const { return reward_; }
  double path_cost() const { return inst_->budget() - state_.remaining_budget; }
  int steps() const { return static_cast<int>(state_.path.size()) - 1; }

  /// N(v_k), ascending ids.
  std::vector<VertexId> actions() const;
  /// Constrained: {x in N(v_k) : c(v_k, x) + sp(x, v_t) <= B_r}. Naive: affordable neighbors.
  std::vector<VertexId> valid_actions() const;
  /// Uniform over unvisited valid actions if any, else over all valid actions.
  VertexId explore_action(Rng& rng) const;
  /// State transition and penalty rule. Throws InvalidAction if `a` is not adjacent.
  Transition step(VertexId a);

 private:
  void require_live(const char* op) const;
  bool feasible(VertexId a) const;

  const ProblemInstance* inst_;
  Exploration mode_;
  EpisodeState state_;
  MiEvaluator evaluator_;
  double arc_ = 0.0;
  double reward_ = 0.0;
  int step_count_ = 0;
};

Episode reset(const ProblemInstance& inst, Exploration mode = Exploration::Constrained);

/// Runs one episode driven purely by explore_action.
std::vector<Transition> explore_episode(const ProblemInstance& inst, Rng& rng,
                                        Exploration mode = Exploration::Constrained);

}  // namespace ipp
