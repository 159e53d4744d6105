#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ipp/graph.hpp"

namespace ipp {

inline constexpr int kResultSchemaVersion = 1;

/// Outcome of one solver run on one instance.
struct PlanResult {
  std::string solver;
  std::vector<VertexId> path;
  double cost = 0.0;
  /// f_D(path).
  double mi_total = 0.0;
  /// f_D(path) - f_D([v_s]).
  double mi_gain_over_pilot = 0.0;
  double wall_time_s = 0.0;
  bool valid = false;
  /// False when a solver stopped early (brute-force time limit).
  bool complete = true;
  std::uint64_t seed = 0;
  double budget = 0.0;
  VertexId start = 0;
  VertexId terminal = 0;
  /// Number of candidate paths scored (episodes, individuals, enumerated paths).
  long long evaluations = 0;

  // RL-only traces.
  std::vector<double> epoch_rewards;   // mean episode return per epoch
  std::vector<double> best_trace;      // best-seen f_D after each episode, 0 before any valid path
  std::vector<double> epoch_valid_fraction;
  /// First episode (1-based) at which the final best value was reached; 0 if never.
  int episodes_to_best = 0;

  bool operator==(const PlanResult&) const = default;
};

/// One newline-free JSON record carrying `"schema": kResultSchemaVersion`.
std::string to_json_line(const PlanResult& r);
/// Throws LoadError on malformed JSON or an unknown schema version.
PlanResult parse_result_line(std::string_view line);
/// Newline-delimited records; blank lines are skipped, errors carry line numbers.
std::vector<PlanResult> parse_results(std::string_view text);
std::vector<PlanResult> load_results_file(const std::string& filename);

}  // namespace ipp
