#include "ipp/qlearn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace ipp {

double EpsilonSchedule::at(int epoch) const {
  if (decay_epochs <= 0 || epoch >= decay_epochs) return end;
  const double frac = static_cast<double>(epoch) / static_cast<double>(decay_epochs);
  return start + (end - start) * frac;
}

void TrainingConfig::validate() const {
  auto positive = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("training config: ") + what);
  };
  positive(episodes > 0, "episodes must be positive");
  positive(epoch_size > 0, "epoch_size must be positive");
  positive(epsilon.start >= 0.0 && epsilon.start <= 1.0, "epsilon start outside [0,1]");
  positive(epsilon.end >= 0.0 && epsilon.end <= 1.0, "epsilon end outside [0,1]");
  positive(gamma >= 0.0 && gamma <= 1.0, "gamma outside [0,1]");
  positive(learning_rate > 0.0, "learning_rate must be positive");
  positive(batch_size > 0, "batch_size must be positive");
  positive(target_sync > 0, "target_sync must be positive");
  positive(search_interval > 0, "search_interval must be positive");
  positive(hidden > 0, "hidden must be positive");
  positive(replay_capacity > 0, "replay_capacity must be positive");
  positive(beta_start >= 0.0 && beta_end >= 0.0, "beta must be >= 0");
}

TdResult td_loss_and_gradient(const QNetwork& net, const QNetwork& target,
                              std::span<const Transition* const> batch,
                              std::span<const double> weights, double gamma,
                              const SpatialGraph& g, std::span<const Point2> table,
                              std::vector<double>& grad) {
  const int n = static_cast<int>(batch.size());
  if (n == 0) throw InvalidArgument("td update needs a non-empty batch");

  // s' extends s by one vertex whenever the step was accepted, so a single
  // online pass over s' yields both Q(s, .) and Q(s', .).
  std::vector<std::vector<VertexId>> online_paths(static_cast<std::size_t>(n));
  std::vector<std::vector<VertexId>> target_paths;
  std::vector<int> target_index(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const auto& tr = *batch[static_cast<std::size_t>(i)];
    const bool advanced = tr.next.path.size() > tr.state.path.size();
    online_paths[static_cast<std::size_t>(i)] = advanced ? tr.next.path : tr.state.path;
    if (!tr.done) {
      target_index[static_cast<std::size_t>(i)] = static_cast<int>(target_paths.size());
      target_paths.push_back(tr.next.path);
    }
  }
  LstmTape tape, target_tape;
  net.forward_batch(online_paths, table, tape);
  if (!target_paths.empty()) target.forward_batch(target_paths, table, target_tape);

  TdResult out;
  out.td_errors.resize(static_cast<std::size_t>(n));
  out.targets.resize(static_cast<std::size_t>(n));
  std::vector<Readout> seeds;
  seeds.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& tr = *batch[static_cast<std::size_t>(i)];
    const int s_step = static_cast<int>(tr.state.path.size()) - 1;
    const double q_sa = net.readout(tape, i, s_step)(tr.action);
    double y = tr.reward;
    if (!tr.done) {
      const int next_step = static_cast<int>(tr.next.path.size()) - 1;
      const Eigen::VectorXd q_next = net.readout(tape, i, next_step);
      const VertexId best = masked_argmax(q_next, g, tr.next.current());
      const int ti = target_index[static_cast<std::size_t>(i)];
      y += gamma * target.readout(target_tape, ti, next_step)(best);
    }
    const double delta = q_sa - y;
    const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
    out.loss += w * delta * delta;
    out.td_errors[static_cast<std::size_t>(i)] = std::abs(delta);
    out.targets[static_cast<std::size_t>(i)] = y;
    seeds.push_back({i, s_step, tr.action, 2.0 * w * delta});
  }
  net.backward(tape, seeds, grad);
  return out;
}

TdResult td_update(QNetwork& net, const QNetwork& target, std::span<const Transition* const> batch,
                   std::span<const double> weights, double gamma, const SpatialGraph& g,
                   AdamOptimizer& optimizer) {
  thread_local std::vector<double> grad;
  const auto table = net.normalized_table(g);
  auto out = td_loss_and_gradient(net, target, batch, weights, gamma, g, table, grad);
  if (!std::isfinite(out.loss)) throw NumericalError("non-finite TD loss");
  optimizer.step(net.parameters(), grad);
  return out;
}

namespace {

Rollout rollout_with_table(const ProblemInstance& inst, const QNetwork& net,
                           std::span<const Point2> table) {
  Episode ep(inst);
  const auto& g = inst.graph();
  while (!ep.done()) {
    const auto& path = ep.state().path;
    const VertexId a = masked_argmax(net.forward(path, table), g, path.back());
    ep.step(a);
  }
  Rollout r;
  r.path = ep.state().path;
  r.valid = ep.succeeded();
  r.reward = ep.path_reward();
  return r;
}

}  // namespace

Rollout greedy_rollout(const ProblemInstance& inst, const QNetwork& net) {
  if (static_cast<std::size_t>(net.output_size()) != inst.graph().size())
    throw InvalidArgument("network output size does not match the graph");
  return rollout_with_table(inst, net, net.normalized_table(inst.graph()));
}

TrainOutcome train_network(const ProblemInstance& inst, const TrainingConfig& cfg,
                           const QNetwork* init) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto& g = inst.graph();
  const int vcount = static_cast<int>(g.size());

  TrainOutcome out;
  if (init) {
    if (init->output_size() != vcount)
      throw InvalidArgument("initial network has " + std::to_string(init->output_size()) +
                            " outputs, graph has " + std::to_string(vcount) + " vertices");
    out.network = *init;
  } else {
    out.network = QNetwork(cfg.hidden, vcount, Normalization::from_graph(g),
                           cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  }
  QNetwork& net = out.network;
  QNetwork target = net;
  AdamOptimizer opt(net.parameter_count(), cfg.learning_rate, cfg.clip_norm);
  ReplayBuffer buffer(cfg.replay_capacity, cfg.priority_alpha);
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const auto table = net.normalized_table(g);
  thread_local std::vector<double> grad;

  PlanResult& res = out.result;
  res.solver = cfg.exploration == Exploration::Constrained ? "rl" : "rl-naive";
  res.seed = cfg.seed;
  res.budget = inst.budget();
  res.start = inst.start();
  res.terminal = inst.terminal();

  std::vector<VertexId> best_path;
  double best_reward = 0.0;
  bool have_best = false;
  long long updates = 0;
  double epoch_sum = 0.0;
  int epoch_valid = 0, epoch_count = 0;
  std::vector<const Transition*> batch;

  auto offer = [&](const std::vector<VertexId>& path, double reward, int episode) {
    if (!have_best || reward > best_reward) {
      best_reward = reward;
      best_path = path;
      have_best = true;
      res.episodes_to_best = episode;
    }
  };

  for (int e = 1; e <= cfg.episodes; ++e) {
    const int epoch = (e - 1) / cfg.epoch_size;
    const double eps = cfg.epsilon.at(epoch);
    const double beta =
        cfg.beta_start + (cfg.beta_end - cfg.beta_start) * static_cast<double>(e - 1) /
                             static_cast<double>(std::max(1, cfg.episodes - 1));
    Episode ep(inst, cfg.exploration);
    double ret = 0.0;
    bool all_explore = true;
    while (!ep.done()) {
      VertexId a;
      if (coin(rng) < eps) {
        a = ep.explore_action(rng);
      } else {
        all_explore = false;
        const auto& path = ep.state().path;
        a = masked_argmax(net.forward(path, table), g, path.back());
      }
      Transition tr = ep.step(a);
      ret += tr.reward;
      buffer.push(std::move(tr));

      if (buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
        const auto sample = buffer.sample(static_cast<std::size_t>(cfg.batch_size), beta, rng);
        batch.clear();
        for (auto slot : sample.slots) batch.push_back(&buffer.at(slot));
        const auto td =
            td_loss_and_gradient(net, target, batch, sample.weights, cfg.gamma, g, table, grad);
        if (!std::isfinite(td.loss)) {
          std::ostringstream msg;
          msg << "training diverged: non-finite TD loss at episode " << e << ", update "
              << updates;
          throw NumericalError(msg.str());
        }
        opt.step(net.parameters(), grad);
        buffer.update_priorities(sample.slots, td.td_errors);
        if (++updates % cfg.target_sync == 0) target = net;
      }
    }
    const bool valid = ep.succeeded();
    if (valid) offer(ep.state().path, ep.path_reward(), e);
    if (e % cfg.search_interval == 0) {
      const auto r = rollout_with_table(inst, net, table);
      if (r.valid) offer(r.path, r.reward, e);
    }
    out.episode_returns.push_back(ret);
    out.episode_valid.push_back(valid ? 1 : 0);
    out.episode_all_explore.push_back(all_explore ? 1 : 0);
    res.best_trace.push_back(have_best ? best_reward : 0.0);
    epoch_sum += ret;
    epoch_valid += valid ? 1 : 0;
    ++epoch_count;
    if (epoch_count == cfg.epoch_size || e == cfg.episodes) {
      res.epoch_rewards.push_back(epoch_sum / epoch_count);
      res.epoch_valid_fraction.push_back(static_cast<double>(epoch_valid) / epoch_count);
      epoch_sum = 0.0;
      epoch_valid = 0;
      epoch_count = 0;
    }
  }

  res.evaluations = cfg.episodes;
  if (have_best) {
    res.path = best_path;
    res.cost = path_cost(g, best_path);
    res.mi_total = best_reward;
    res.mi_gain_over_pilot = best_reward - inst.start_reward();
    res.valid = inst.is_valid(best_path);
  } else {
    res.valid = false;
  }
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

PlanResult train(const ProblemInstance& inst, const TrainingConfig& cfg) {
  return train_network(inst, cfg).result;
}

int episodes_to_reach(std::span<const double> best_trace, double level, double tol) {
  for (std::size_t i = 0; i < best_trace.size(); ++i)
    if (best_trace[i] >= level - tol) return static_cast<int>(i) + 1;
  return 0;
}

}  // namespace ipp
