#include "ipp/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "ipp/cli/svg.hpp"
#include "json.hpp"

namespace ipp::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& file, const std::string& text) {
  std::ofstream f(file, std::ios::binary);
  if (!f) throw LoadError("cannot write '" + file.string() + "'");
  f << text;
}

fs::path output_dir(const CommandOptions& opts, const ExperimentConfig* cfg) {
  fs::path dir = opts.out ? *opts.out : fs::path(cfg ? cfg->output_dir : "results");
  fs::create_directories(dir);
  return dir;
}

std::vector<std::uint64_t> seeds_for(const CommandOptions& opts, const ExperimentConfig& cfg) {
  if (opts.seed) return {*opts.seed};
  return cfg.seeds;
}

Endpoints base_endpoints(const ExperimentConfig& cfg) {
  return {cfg.instance.start, cfg.instance.terminal, cfg.instance.budget};
}

std::string records(std::span<const PlanResult> rs) {
  std::string out;
  for (const auto& r : rs) out += to_json_line(r) + "\n";
  return out;
}

void write_results(const fs::path& dir, const std::string& stem, std::span<const PlanResult> rs) {
  write_file(dir / (stem + ".ndjson"), records(rs));
  std::string csv = summary_csv_header();
  for (const auto& r : rs) csv += summary_csv_row(r);
  write_file(dir / (stem + "_summary.csv"), csv);
}

void report(std::ostream& log, const PlanResult& r) {
  log << r.solver << " seed=" << r.seed << " budget=" << r.budget << " mi=" << fmt(r.mi_total)
      << " cost=" << r.cost << " valid=" << (r.valid ? 1 : 0)
      << (r.complete ? "" : " (incomplete)") << " time=" << r.wall_time_s << "s\n";
}

CheckpointMeta meta_for(const ProblemInstance& inst) {
  CheckpointMeta m;
  m.vertex_count = static_cast<int>(inst.graph().size());
  m.start = inst.start();
  m.terminal = inst.terminal();
  m.budget = inst.budget();
  m.spacing = inst.spacing();
  return m;
}

}  // namespace

PlanResult run_solver(const std::string& algo, const ProblemInstance& inst,
                      const ExperimentConfig& cfg, std::uint64_t seed) {
  PlanResult r;
  if (algo == "rl") {
    TrainingConfig tc = cfg.rl;
    tc.seed = seed;
    r = train(inst, tc);
  } else if (algo == "greedy") {
    r = greedy_tsp(inst);
  } else if (algo == "ga") {
    GaConfig gc = cfg.ga;
    gc.seed = seed;
    r = genetic(inst, gc);
  } else if (algo == "rg") {
    r = recursive_greedy(inst, cfg.rg);
  } else if (algo == "brute") {
    r = brute_force(inst, cfg.brute);
  } else {
    throw InvalidArgument("unknown solver '" + algo + "' (expected rl, greedy, ga, rg or brute)");
  }
  r.seed = seed;
  return r;
}

Aggregate aggregate(std::span<const PlanResult> results) {
  Aggregate a;
  if (results.empty()) return a;
  a.solver = results.front().solver;
  a.count = static_cast<int>(results.size());
  a.max_mi = a.min_mi = results.front().mi_total;
  for (const auto& r : results) {
    a.mean_mi += r.mi_total;
    a.mean_wall_time_s += r.wall_time_s;
    a.max_mi = std::max(a.max_mi, r.mi_total);
    a.min_mi = std::min(a.min_mi, r.mi_total);
  }
  a.mean_mi /= a.count;
  a.mean_wall_time_s /= a.count;
  return a;
}

std::string summary_csv_header() {
  return "solver,seed,start,terminal,budget,cost,mi_total,mi_gain_over_pilot,valid,complete,"
         "evaluations,wall_time_s\n";
}

std::string summary_csv_row(const PlanResult& r) {
  return r.solver + "," + std::to_string(r.seed) + "," + std::to_string(r.start) + "," +
         std::to_string(r.terminal) + "," + fmt(r.budget) + "," + fmt(r.cost) + "," +
         fmt(r.mi_total) + "," + fmt(r.mi_gain_over_pilot) + "," + (r.valid ? "1" : "0") + "," +
         (r.complete ? "1" : "0") + "," + std::to_string(r.evaluations) + "," +
         fmt(r.wall_time_s) + "\n";
}

std::string aggregate_csv(std::span<const Aggregate> rows) {
  std::string out = "solver,count,mean_mi,max_mi,min_mi,mean_wall_time_s\n";
  for (const auto& a : rows)
    out += a.solver + "," + std::to_string(a.count) + "," + fmt(a.mean_mi) + "," + fmt(a.max_mi) +
           "," + fmt(a.min_mi) + "," + fmt(a.mean_wall_time_s) + "\n";
  return out;
}

int cmd_fit_gp(const CommandOptions& opts, std::ostream& log) {
  std::optional<ExperimentConfig> cfg;
  if (!opts.config.empty()) cfg = load_config_file(opts.config);
  PilotData pilot;
  KernelParams init;
  FitOptions fo;
  if (!opts.pilot.empty()) {
    pilot = load_pilot_csv(opts.pilot.string());
    if (cfg) init = cfg->gp.kernel, fo = cfg->gp.fit_options;
  } else if (cfg) {
    const auto exp = build_experiment([&] {
      auto c = *cfg;
      c.gp.fit = false;
      return c;
    }());
    pilot = exp.pilot;
    init = cfg->gp.kernel;
    fo = cfg->gp.fit_options;
  } else {
    throw InvalidArgument("fit-gp needs --config or --pilot");
  }
  if (opts.seed) fo.seed = *opts.seed;
  const auto dir = output_dir(opts, cfg ? &*cfg : nullptr);
  const FitResult fit = fit_hyperparameters(pilot, init, fo);

  nlohmann::json j;
  j["schema"] = kResultSchemaVersion;
  j["kind"] = "fit";
  j["pilot_count"] = pilot.size();
  j["signal_variance"] = fit.params.signal_variance;
  j["lengthscale"] = fit.params.lengthscale;
  j["noise_variance"] = fit.params.noise_variance;
  j["log_likelihood"] = fit.log_likelihood;
  j["initial_log_likelihood"] = fit.initial_log_likelihood;
  j["degenerate"] = fit.degenerate;
  j["iterations"] = fit.iterations;
  write_file(dir / "fit.json", j.dump(2) + "\n");
  if (cfg && cfg->gp.synthetic) write_file(dir / "pilot.csv", format_pilot_csv(pilot));
  log << "fitted signal_variance=" << fmt(fit.params.signal_variance)
      << " lengthscale=" << fmt(fit.params.lengthscale)
      << " noise_variance=" << fmt(fit.params.noise_variance)
      << " lml=" << fmt(fit.log_likelihood) << (fit.degenerate ? " (degenerate pilot data)" : "")
      << "\n";
  return 0;
}

int cmd_plan(const CommandOptions& opts, std::ostream& log) {
  if (opts.algo.empty()) throw InvalidArgument("plan needs --algo");
  const auto cfg = load_config_file(opts.config);
  const auto dir = output_dir(opts, &cfg);
  const auto exp = build_experiment(cfg);
  const auto inst = make_problem(exp, base_endpoints(cfg), cfg.instance.sample_spacing);
  std::vector<PlanResult> results;
  for (auto seed : seeds_for(opts, cfg)) {
    results.push_back(run_solver(opts.algo, inst, cfg, seed));
    report(log, results.back());
  }
  write_results(dir, "plan_" + opts.algo, results);
  const Aggregate agg = aggregate(results);
  write_file(dir / ("plan_" + opts.algo + "_aggregate.csv"), aggregate_csv({&agg, 1}));
  log << "mean mi=" << fmt(agg.mean_mi) << " max mi=" << fmt(agg.max_mi) << "\n";
  return 0;
}

int cmd_train(const CommandOptions& opts, std::ostream& log) {
  const auto cfg = load_config_file(opts.config);
  const auto dir = output_dir(opts, &cfg);
  const auto exp = build_experiment(cfg);
  const auto inst = make_problem(exp, base_endpoints(cfg), cfg.instance.sample_spacing);
  std::vector<PlanResult> results;
  for (auto seed : seeds_for(opts, cfg)) {
    TrainingConfig tc = cfg.rl;
    tc.seed = seed;
    auto out = train_network(inst, tc);
    CheckpointMeta meta = meta_for(inst);
    meta.seed = seed;
    meta.episodes = tc.episodes;
    meta.gamma = tc.gamma;
    meta.learning_rate = tc.learning_rate;
    const auto file = dir / ("qnet_seed" + std::to_string(seed) + ".ckpt");
    write_checkpoint_file(file.string(), save_checkpoint(out.network, tc, meta));
    report(log, out.result);
    log << "checkpoint " << file.string() << "\n";
    results.push_back(std::move(out.result));
  }
  write_results(dir, "train", results);
  const Aggregate agg = aggregate(results);
  write_file(dir / "train_aggregate.csv", aggregate_csv({&agg, 1}));
  return 0;
}

int cmd_transfer(const CommandOptions& opts, std::ostream& log) {
  if (opts.from.empty()) throw InvalidArgument("transfer needs --from <checkpoint>");
  const auto cfg = load_config_file(opts.config);
  const auto ck = load_checkpoint(read_checkpoint_file(opts.from.string()));
  const auto dir = output_dir(opts, &cfg);
  const auto exp = build_experiment(cfg);
  if (static_cast<std::size_t>(ck.meta.vertex_count) != exp.graph->size())
    throw InvalidArgument("checkpoint was trained on " + std::to_string(ck.meta.vertex_count) +
                          " vertices but the graph has " + std::to_string(exp.graph->size()) +
                          "; the Q-network output layer is graph-specific");
  const Endpoints target = cfg.transfer.value_or(base_endpoints(cfg));
  const int changed = (target.start != ck.meta.start) + (target.terminal != ck.meta.terminal) +
                      (std::abs(target.budget - ck.meta.budget) > 1e-12);
  if (changed != 1)
    std::cerr << "warning: target differs from the checkpoint instance in " << changed
              << " of {budget, start, terminal}; transfer is meant for exactly one change\n";
  const auto inst = make_problem(exp, target, cfg.instance.sample_spacing);

  std::vector<PlanResult> results;
  std::string csv =
      "seed,scratch_best,scratch_episodes_to_best,finetune_best,finetune_episodes_to_best,"
      "finetune_episodes_to_scratch_best\n";
  for (auto seed : seeds_for(opts, cfg)) {
    TrainingConfig tc = cfg.rl;
    tc.seed = seed;
    tc.hidden = ck.network.hidden_size();
    auto scratch = train_network(inst, tc).result;
    scratch.solver = "rl-scratch";
    auto tuned = train_network(inst, tc, &ck.network).result;
    tuned.solver = "rl-finetune";
    const int reach = episodes_to_reach(tuned.best_trace, scratch.mi_total);
    csv += std::to_string(seed) + "," + fmt(scratch.mi_total) + "," +
           std::to_string(scratch.episodes_to_best) + "," + fmt(tuned.mi_total) + "," +
           std::to_string(tuned.episodes_to_best) + "," + std::to_string(reach) + "\n";
    report(log, scratch);
    report(log, tuned);
    log << "fine-tuned run reached the scratch best at episode " << reach << " (scratch: "
        << scratch.episodes_to_best << ")\n";
    results.push_back(std::move(scratch));
    results.push_back(std::move(tuned));
  }
  write_file(dir / "transfer.ndjson", records(results));
  write_file(dir / "transfer.csv", csv);
  return 0;
}

int cmd_bench(const CommandOptions& opts, std::ostream& log) {
  const auto cfg = load_config_file(opts.config);
  const auto dir = output_dir(opts, &cfg);
  std::vector<std::string> solvers = cfg.bench_solvers;
  if (!opts.algo.empty()) solvers = {opts.algo};
  std::vector<double> budgets = cfg.bench_budgets;
  if (budgets.empty()) budgets = {cfg.instance.budget};

  std::string csv = "solver,budget,seed,status,mi_total,cost,valid,wall_time_s\n";
  std::vector<PlanResult> results;
  int failures = 0;
  if (!solvers.empty()) {
    const auto exp = build_experiment(cfg);
    for (const auto& solver : solvers) {
      for (double budget : budgets) {
        for (auto seed : seeds_for(opts, cfg)) {
          try {
            const auto inst = make_problem(
                exp, {cfg.instance.start, cfg.instance.terminal, budget}, cfg.instance.sample_spacing);
            auto r = run_solver(solver, inst, cfg, seed);
            csv += solver + "," + fmt(budget) + "," + std::to_string(seed) + ",ok," +
                   fmt(r.mi_total) + "," + fmt(r.cost) + "," + (r.valid ? "1" : "0") + "," +
                   fmt(r.wall_time_s) + "\n";
            report(log, r);
            results.push_back(std::move(r));
          } catch (const std::exception& e) {
            ++failures;
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            csv += solver + "," + fmt(budget) + "," + std::to_string(seed) + ",error: " + msg +
                   ",,,,\n";
            log << solver << " budget=" << budget << " seed=" << seed << " failed: " << e.what()
                << "\n";
          }
        }
      }
    }
  }
  write_file(dir / "bench.csv", csv);
  write_file(dir / "bench.ndjson", records(results));
  return failures == 0 ? 0 : 1;
}

int cmd_plot(const CommandOptions& opts, std::ostream& log) {
  if (opts.inputs.empty()) throw InvalidArgument("plot needs at least one results file");
  std::vector<PlanResult> all;
  for (const auto& f : opts.inputs) {
    try {
      auto rs = load_results_file(f.string());
      all.insert(all.end(), rs.begin(), rs.end());
    } catch (const LoadError& e) {
      throw LoadError(f.string() + ": " + e.what());
    }
  }
  std::optional<ExperimentConfig> cfg;
  if (!opts.config.empty()) cfg = load_config_file(opts.config);
  const fs::path dir = opts.out ? *opts.out : fs::path("plots");
  fs::create_directories(dir);

  std::map<std::string, std::vector<const PlanResult*>> by_solver;
  for (const auto& r : all) by_solver[r.solver].push_back(&r);

  int written = 0;
  for (const auto& [solver, rs] : by_solver) {
    std::vector<const PlanResult*> traced;
    for (auto* r : rs)
      if (!r->epoch_rewards.empty()) traced.push_back(r);
    if (traced.empty()) continue;
    std::size_t epochs = traced.front()->epoch_rewards.size();
    for (auto* r : traced) epochs = std::min(epochs, r->epoch_rewards.size());
    Series mean{"mean epoch reward", {}, {}, {}, {}, false};
    Series best{"best-seen MI gain", {}, {}, {}, {}, true};
    for (std::size_t e = 0; e < epochs; ++e) {
      double s = 0, lo = traced.front()->epoch_rewards[e], hi = lo, b = 0;
      for (auto* r : traced) {
        const double v = r->epoch_rewards[e];
        s += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        const std::size_t per_epoch = r->best_trace.size() / r->epoch_rewards.size();
        const std::size_t idx = std::min(r->best_trace.size(), (e + 1) * std::max<std::size_t>(1, per_epoch));
        const double start_reward = r->mi_total - r->mi_gain_over_pilot;
        b += idx > 0 && r->best_trace[idx - 1] > 0.0 ? r->best_trace[idx - 1] - start_reward : 0.0;
      }
      mean.x.push_back(static_cast<double>(e + 1));
      mean.y.push_back(s / static_cast<double>(traced.size()));
      if (traced.size() > 1) {
        mean.lo.push_back(lo);
        mean.hi.push_back(hi);
      }
      best.x.push_back(static_cast<double>(e + 1));
      best.y.push_back(b / static_cast<double>(traced.size()));
    }
    const std::string title = solver + " (" + std::to_string(traced.size()) + " run" +
                              (traced.size() > 1 ? "s" : "") + ")";
    write_file(dir / ("reward_" + solver + ".svg"),
               line_chart(title, "epoch", "reward (nats)", {mean, best}));
    ++written;
  }

  std::set<double> budgets;
  for (const auto& r : all) budgets.insert(r.budget);
  if (budgets.size() > 1) {
    std::vector<Series> lines;
    for (const auto& [solver, rs] : by_solver) {
      std::map<double, std::pair<double, int>> acc;
      for (auto* r : rs) {
        acc[r->budget].first += r->mi_total;
        acc[r->budget].second += 1;
      }
      Series s{solver, {}, {}, {}, {}, false};
      for (const auto& [b, v] : acc) {
        s.x.push_back(b);
        s.y.push_back(v.first / v.second);
      }
      lines.push_back(std::move(s));
    }
    write_file(dir / "mi_vs_budget.svg", line_chart("MI vs budget", "budget (m)", "MI (nats)", lines));
    ++written;
  }

  if (cfg) {
    const auto exp = build_experiment(*cfg);
    const auto entropies = vertex_entropies(*exp.model);
    for (const auto& [solver, rs] : by_solver) {
      const PlanResult* best = nullptr;
      for (auto* r : rs)
        if (r->valid && (!best || r->mi_total > best->mi_total)) best = r;
      if (!best) continue;
      make_path(*exp.graph, best->path);
      write_file(dir / ("path_" + solver + ".svg"),
                 path_overlay(solver + " best path, MI " + fmt(best->mi_total).substr(0, 8) + " nats",
                              *exp.graph, entropies, best->path));
      ++written;
    }
  }
  log << "wrote " << written << " plot(s) to " << dir.string() << "\n";
  return 0;
}

}  // namespace ipp::cli
