#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ipp/env.hpp"
#include "ipp/plan_result.hpp"
#include "ipp/qnetwork.hpp"
#include "ipp/replay.hpp"

namespace ipp {

/// Linear decay from `start` to `end` over `decay_epochs`, flat afterwards.
struct EpsilonSchedule {
  double start = 0.9;
  double end = 0.1;
  int decay_epochs = 50;

  double at(int epoch) const;
};

struct TrainingConfig {
  int episodes = 5000;
  int epoch_size = 50;
  EpsilonSchedule epsilon;
  double gamma = 1.0;
  double learning_rate = 1e-3;
  double clip_norm = 1.0;
  int batch_size = 32;
  int target_sync = 100;      // gradient steps between target-network copies
  int search_interval = 10;   // episodes between greedy rollouts
  int hidden = 64;
  std::size_t replay_capacity = 100000;
  double priority_alpha = 0.6;
  double beta_start = 0.4;
  double beta_end = 1.0;
  std::uint64_t seed = 0;
  Exploration exploration = Exploration::Constrained;

  void validate() const;
};

struct TdResult {
  double loss = 0.0;
  std::vector<double> td_errors;  // |Q(s,a) - y| per sample
  std::vector<double> targets;    // y per sample
};

/// Loss sum_i w_i (Q(s_i, a_i) - y_i)^2 and its gradient w.r.t. `net`'s
/// parameters. Targets are double-Q: the online network picks the masked
/// argmax at s', the target network evaluates it; terminal samples use y = r.
TdResult td_loss_and_gradient(const QNetwork& net, const QNetwork& target,
                              std::span<const Transition* const> batch,
                              std::span<const double> weights, double gamma,
                              const SpatialGraph& g, std::span<const Point2> table,
                              std::vector<double>& grad);

/// One optimizer step on the batch loss.
TdResult td_update(QNetwork& net, const QNetwork& target, std::span<const Transition* const> batch,
                   std::span<const double> weights, double gamma, const SpatialGraph& g,
                   AdamOptimizer& optimizer);

struct Rollout {
  std::vector<VertexId> path;
  bool valid = false;
  double reward = 0.0;  // f_D(path) when valid
};

/// Follows the masked argmax from the reset state until v_t, a penalty, or the step cap.
Rollout greedy_rollout(const ProblemInstance& inst, const QNetwork& net);

struct TrainOutcome {
  PlanResult result;
  QNetwork network;
  /// Per-episode return and validity; whether the episode used only exploration actions.
  std::vector<double> episode_returns;
  std::vector<char> episode_valid;
  std::vector<char> episode_all_explore;
};

/// Learning-and-searching loop. `init` warm-starts the online network (transfer).
TrainOutcome train_network(const ProblemInstance& inst, const TrainingConfig& cfg,
                           const QNetwork* init = nullptr);
PlanResult train(const ProblemInstance& inst, const TrainingConfig& cfg);

/// First episode (1-based) whose best-seen value is within `tol` of `level`; 0 if never.
int episodes_to_reach(std::span<const double> best_trace, double level, double tol = 1e-9);

/// Instance the checkpoint was trained on.
struct CheckpointMeta {
  int vertex_count = 0;
  VertexId start = 0;
  VertexId terminal = 0;
  double budget = 0.0;
  double spacing = 1.0;
  std::uint64_t seed = 0;
  int episodes = 0;
  double gamma = 1.0;
  double learning_rate = 1e-3;
};

struct Checkpoint {
  QNetwork network;
  CheckpointMeta meta;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string save_checkpoint(const QNetwork& net, const TrainingConfig& cfg,
                            const CheckpointMeta& meta);
/// Throws CheckpointError on bad magic, version mismatch, truncation or checksum failure.
Checkpoint load_checkpoint(std::string_view bytes);
void write_checkpoint_file(const std::string& filename, const std::string& bytes);
std::string read_checkpoint_file(const std::string& filename);

}  // namespace ipp
