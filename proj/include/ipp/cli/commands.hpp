#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ipp/cli/config.hpp"
#include "ipp/plan_result.hpp"

namespace ipp::cli {

struct CommandOptions {
  std::filesystem::path config;
  std::string algo;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::filesystem::path from;
  /// fit-gp without a config file.
  std::filesystem::path pilot;
  std::vector<std::filesystem::path> inputs;
};

/// Exit codes: 0 success, 1 some cells failed, 2 structural error (bad input).
int cmd_fit_gp(const CommandOptions& opts, std::ostream& log);
int cmd_plan(const CommandOptions& opts, std::ostream& log);
int cmd_train(const CommandOptions& opts, std::ostream& log);
int cmd_transfer(const CommandOptions& opts, std::ostream& log);
int cmd_bench(const CommandOptions& opts, std::ostream& log);
int cmd_plot(const CommandOptions& opts, std::ostream& log);

/// Runs one named solver (rl, greedy, ga, rg, brute) with the config's settings.
PlanResult run_solver(const std::string& algo, const ProblemInstance& inst,
                      const ExperimentConfig& cfg, std::uint64_t seed);

struct Aggregate {
  std::string solver;
  int count = 0;
  double mean_mi = 0.0;
  double max_mi = 0.0;
  double min_mi = 0.0;
  double mean_wall_time_s = 0.0;
};

Aggregate aggregate(std::span<const PlanResult> results);

std::string summary_csv_header();
std::string summary_csv_row(const PlanResult& r);
std::string aggregate_csv(std::span<const Aggregate> rows);

}  // namespace ipp::cli
