#include <iostream>

#include "CLI11.hpp"
#include "ipp/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace ipp::cli;
  CLI::App app{"Informative path planning: GP fitting, planners and benchmarks"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::string> inputs;

  auto add_common = [&](CLI::App* cmd, bool need_config) {
    auto* c = cmd->add_option("--config", opts.config, "experiment config (JSON)");
    if (need_config) c->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "single seed overriding the config's seed list");
    cmd->add_option("--out", out, "output directory");
  };

  auto* fit = app.add_subcommand("fit-gp", "fit kernel hyperparameters to pilot data");
  add_common(fit, false);
  fit->add_option("--pilot", opts.pilot, "pilot CSV (x,y,value)")->check(CLI::ExistingFile);

  auto* plan = app.add_subcommand("plan", "run one solver for every seed");
  add_common(plan, true);
  plan->add_option("--algo", opts.algo, "rl, greedy, ga, rg or brute")
      ->required()
      ->check(CLI::IsMember({"rl", "greedy", "ga", "rg", "brute"}));

  auto* train = app.add_subcommand("train", "train the Q-network and save checkpoints");
  add_common(train, true);

  auto* transfer = app.add_subcommand("transfer", "fine-tune from a checkpoint vs random init");
  add_common(transfer, true);
  transfer->add_option("--from", opts.from, "checkpoint file")->required()->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "solver x budget grid with runtimes");
  add_common(bench, true);
  bench->add_option("--algo", opts.algo, "restrict the grid to one solver")
      ->check(CLI::IsMember({"rl", "greedy", "ga", "rg", "brute"}));

  auto* plot = app.add_subcommand("plot", "render SVG plots from result records");
  add_common(plot, false);
  plot->add_option("results", inputs, "result .ndjson files")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  for (auto* cmd : {fit, plan, train, transfer, bench, plot}) {
    if (!cmd->parsed()) continue;
    if (cmd->count("--seed")) opts.seed = seed;
    if (cmd->count("--out")) opts.out = out;
  }
  for (const auto& f : inputs) opts.inputs.emplace_back(f);

  try {
    if (fit->parsed()) return cmd_fit_gp(opts, std::cout);
    if (plan->parsed()) return cmd_plan(opts, std::cout);
    if (train->parsed()) return cmd_train(opts, std::cout);
    if (transfer->parsed()) return cmd_transfer(opts, std::cout);
    if (bench->parsed()) return cmd_bench(opts, std::cout);
    if (plot->parsed()) return cmd_plot(opts, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
