#include "ipp/env.hpp"

#include <algorithm>
#include <cmath>

namespace ipp {

ProblemInstance::ProblemInstance(std::shared_ptr<const SpatialGraph> graph,
                                 std::shared_ptr<const GpModel> model, VertexId start,
                                 VertexId terminal, double budget, double spacing)
    : graph_(std::move(graph)),
      model_(std::move(model)),
      start_(start),
      terminal_(terminal),
      budget_(budget),
      spacing_(spacing) {
  if (!graph_ || !model_) throw InvalidArgument("problem instance needs a graph and a model");
  if (model_->size() != graph_->size())
    throw InvalidArgument("GP model locations do not match the graph");
  if (!graph_->contains(start_) || !graph_->contains(terminal_))
    throw InvalidArgument("start or terminal vertex is not in the graph");
  if (!(spacing_ > 0.0)) throw InvalidArgument("sample spacing must be positive");
  if (!std::isfinite(budget_) || budget_ < 0.0) throw InvalidArgument("budget must be finite and >= 0");
  if (graph_->shortest_path_cost(start_, terminal_) > budget_ + budget_tolerance(budget_))
    throw InvalidArgument("budget is below the shortest path cost from start to terminal");
  auto ev = std::make_shared<MiEvaluator>(*model_);
  ev->append(graph_->position(start_));
  start_reward_ = ev->mutual_information();
  start_eval_ = std::move(ev);
}

int ProblemInstance::step_cap() const {
  const double m = graph_->min_edge_cost();
  if (!(m > 0.0)) return 0;
  return 4 * static_cast<int>(std::ceil(budget_ / m));
}

ProblemInstance ProblemInstance::with(VertexId start, VertexId terminal, double budget) const {
  return ProblemInstance(graph_, model_, start, terminal, budget, spacing_);
}

double ProblemInstance::reward(std::span<const VertexId> path) const {
  return mi_reward(*model_, *graph_, path, spacing_);
}

bool ProblemInstance::is_valid(std::span<const VertexId> path) const {
  if (path.empty() || path.front() != start_ || path.back() != terminal_) return false;
  try {
    return ipp::path_cost(*graph_, path) <= budget_ + budget_tolerance(budget_);
  } catch (const InvalidPath&) {
    return false;
  }
}

Episode::Episode(const ProblemInstance& inst, Exploration mode)
    : inst_(&inst), mode_(mode), evaluator_(inst.start_evaluator()) {
  state_.path = {inst.start()};
  state_.remaining_budget = inst.budget();
  reward_ = inst.start_reward();
  // A tour with no affordable move is already complete.
  if (inst.start() == inst.terminal() && valid_actions().empty()) state_.done = true;
}

bool Episode::succeeded() const {
  return state_.done && !state_.penalized && state_.current() == inst_->terminal();
}

void Episode::require_live(const char* op) const {
  if (state_.done) throw ContractViolation(std::string(op) + " called on a finished episode");
}

std::vector<VertexId> Episode::actions() const {
  require_live("actions");
  std::vector<VertexId> out;
  for (const auto& n : inst_->graph().neighbors(state_.current())) out.push_back(n.vertex);
  return out;
}

bool Episode::feasible(VertexId a) const {
  const auto& g = inst_->graph();
  const double need = g.edge_cost(state_.current(), a) +
                      (mode_ == Exploration::Constrained ? g.shortest_path_cost(a, inst_->terminal())
                                                         : 0.0);
  return need <= state_.remaining_budget + budget_tolerance(inst_->budget());
}

std::vector<VertexId> Episode::valid_actions() const {
  require_live("valid_actions");
  std::vector<VertexId> out;
  for (const auto& n : inst_->graph().neighbors(state_.current()))
    if (feasible(n.vertex)) out.push_back(n.vertex);
  return out;
}

VertexId Episode::explore_action(Rng& rng) const {
  const auto valid = valid_actions();
  if (valid.empty()) throw ContractViolation("no valid action from the current state");
  std::vector<VertexId> fresh;
  for (VertexId v : valid)
    if (std::find(state_.path.begin(), state_.path.end(), v) == state_.path.end())
      fresh.push_back(v);
  const auto& pool = fresh.empty() ? valid : fresh;
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

Transition Episode::step(VertexId a) {
  require_live("step");
  const auto& g = inst_->graph();
  if (!g.contains(a) || !g.adjacent(state_.current(), a))
    throw InvalidAction("action " + std::to_string(a) + " is not a neighbor of vertex " +
                        std::to_string(state_.current()));
  Transition tr;
  tr.state = state_;
  tr.action = a;
  ++step_count_;

  if (!feasible(a)) {
    tr.reward = -state_.cumulative_reward;
    state_.done = true;
    state_.penalized = true;
  } else {
    std::vector<Point2> extra;
    const double cost = g.edge_cost(state_.current(), a);
    arc_ = append_edge_samples(g, state_.current(), a, arc_, inst_->spacing(), extra);
    evaluator_.append(extra);
    const double next_reward = evaluator_.mutual_information();
    tr.reward = next_reward - reward_;
    reward_ = next_reward;
    state_.path.push_back(a);
    state_.remaining_budget = std::max(0.0, state_.remaining_budget - cost);
    state_.cumulative_reward += tr.reward;
    if (a == inst_->terminal()) {
      state_.done = true;
    } else if (valid_actions().empty() || step_count_ >= inst_->step_cap()) {
      // Stranded (naive mode) or over the step cap: the episode return is voided.
      tr.reward -= state_.cumulative_reward;
      state_.done = true;
      state_.penalized = true;
    }
  }
  tr.next = state_;
  tr.done = state_.done;
  return tr;
}

Episode reset(const ProblemInstance& inst, Exploration mode) { return Episode(inst, mode); }

std::vector<Transition> explore_episode(const ProblemInstance& inst, Rng& rng,
                                        Exploration mode) {
  Episode ep(inst, mode);
  std::vector<Transition> out;
  while (!ep.done()) out.push_back(ep.step(ep.explore_action(rng)));
  return out;
}

}  // namespace ipp
