#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ipp/baselines.hpp"
#include "ipp/env.hpp"
#include "ipp/gp.hpp"
#include "ipp/qlearn.hpp"
#include "ipp/synthetic.hpp"

namespace ipp::cli {

struct GridSpec {
  int cols = 0;
  int rows = 0;
  double spacing = 1.0;
};

struct InstanceSpec {
  std::string graph_file;        // exactly one of graph_file / grid
  std::optional<GridSpec> grid;
  VertexId start = 0;
  VertexId terminal = 0;
  double budget = 0.0;
  double sample_spacing = 1.0;
};

struct GpSpec {
  std::string pilot_file;        // exactly one of pilot_file / synthetic
  std::optional<SyntheticField> synthetic;
  /// Fixed parameters, or the initial guess when `fit` is set.
  KernelParams kernel;
  bool fit = false;
  FitOptions fit_options;
};

struct Endpoints {
  VertexId start = 0;
  VertexId terminal = 0;
  double budget = 0.0;
};

struct ExperimentConfig {
  InstanceSpec instance;
  GpSpec gp;
  TrainingConfig rl;
  GaConfig ga;
  RgConfig rg;
  BruteForceOptions brute;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "results";
  std::vector<std::string> bench_solvers;
  std::vector<double> bench_budgets;
  /// Target of `transfer`; defaults to the base instance.
  std::optional<Endpoints> transfer;
};

inline const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names{"rl", "greedy", "ga", "rg", "brute"};
  return names;
}

/// JSON text; relative file names resolve against `base_dir`. Unknown keys are
/// rejected. Throws LoadError / InvalidArgument.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
ExperimentConfig load_config_file(const std::filesystem::path& filename);

struct Experiment {
  std::shared_ptr<const SpatialGraph> graph;
  PilotData pilot;
  KernelParams params;
  std::optional<FitResult> fit;
  std::shared_ptr<const GpModel> model;
};

/// Loads or synthesizes the graph and pilot data, fitting the kernel if requested.
Experiment build_experiment(const ExperimentConfig& cfg);
ProblemInstance make_problem(const Experiment& exp, const Endpoints& ends, double sample_spacing);

}  // namespace ipp::cli
