#include "ipp/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ipp::cli {

using nlohmann::json;

namespace {

// Reads fields from one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw LoadError("config: '" + name_ + "' must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw LoadError("config: bad value for '" + name_ + "." + key + "'");
    }
  }

  Section child(const char* key) {
    seen_.insert(key);
    return Section(j_.at(key), name_ + "." + key);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw LoadError("config: unknown key '" + name_ + "." + k + "'");
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void read_kernel(Section s, KernelParams& k) {
  s.read("signal_variance", k.signal_variance);
  s.read("lengthscale", k.lengthscale);
  s.read("noise_variance", k.noise_variance);
  s.finish();
  k.validate();
}

std::string resolve(const std::filesystem::path& base, const std::string& file) {
  if (file.empty()) return file;
  std::filesystem::path p(file);
  if (p.is_relative()) p = base / p;
  if (!std::filesystem::exists(p)) throw LoadError("config: file not found: " + p.string());
  return p.string();
}

Exploration parse_exploration(const std::string& s) {
  if (s == "constrained") return Exploration::Constrained;
  if (s == "naive") return Exploration::Naive;
  throw LoadError("config: exploration must be 'constrained' or 'naive', got '" + s + "'");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  Section top(root, "config");

  {
    Section s = top.child("instance");
    auto& in = cfg.instance;
    s.read("graph", in.graph_file);
    if (s.has("grid")) {
      Section g = s.child("grid");
      GridSpec grid;
      g.read("cols", grid.cols);
      g.read("rows", grid.rows);
      g.read("spacing", grid.spacing);
      g.finish();
      if (grid.cols < 1 || grid.rows < 1 || !(grid.spacing > 0.0))
        throw LoadError("config: grid needs positive cols, rows and spacing");
      in.grid = grid;
    }
    s.read("start", in.start);
    s.read("terminal", in.terminal);
    s.read("budget", in.budget);
    s.read("sample_spacing", in.sample_spacing);
    s.finish();
    if (in.graph_file.empty() == !in.grid)
      throw LoadError("config: instance needs exactly one of 'graph' and 'grid'");
    in.graph_file = resolve(base_dir, in.graph_file);
    if (!(in.sample_spacing > 0.0)) throw LoadError("config: sample_spacing must be positive");
  }

  {
    Section s = top.child("gp");
    auto& gp = cfg.gp;
    s.read("pilot", gp.pilot_file);
    if (s.has("synthetic")) {
      Section f = s.child("synthetic");
      SyntheticField field;
      f.read("count", field.count);
      f.read("mean", field.mean);
      f.read("seed", field.seed);
      f.read("signal_variance", field.params.signal_variance);
      f.read("lengthscale", field.params.lengthscale);
      f.read("noise_variance", field.params.noise_variance);
      f.finish();
      field.params.validate();
      gp.synthetic = field;
      gp.kernel = field.params;
    }
    if (s.has("kernel")) read_kernel(s.child("kernel"), gp.kernel);
    s.read("fit", gp.fit);
    s.read("fit_starts", gp.fit_options.starts);
    s.read("fit_seed", gp.fit_options.seed);
    s.finish();
    if (gp.pilot_file.empty() == !gp.synthetic)
      throw LoadError("config: gp needs exactly one of 'pilot' and 'synthetic'");
    gp.pilot_file = resolve(base_dir, gp.pilot_file);
  }

  if (top.has("solvers")) {
    Section s = top.child("solvers");
    if (s.has("rl")) {
      Section r = s.child("rl");
      auto& rl = cfg.rl;
      r.read("episodes", rl.episodes);
      r.read("epoch_size", rl.epoch_size);
      r.read("epsilon_start", rl.epsilon.start);
      r.read("epsilon_end", rl.epsilon.end);
      r.read("epsilon_decay_epochs", rl.epsilon.decay_epochs);
      r.read("gamma", rl.gamma);
      r.read("learning_rate", rl.learning_rate);
      r.read("clip_norm", rl.clip_norm);
      r.read("batch_size", rl.batch_size);
      r.read("target_sync", rl.target_sync);
      r.read("search_interval", rl.search_interval);
      r.read("hidden", rl.hidden);
      r.read("replay_capacity", rl.replay_capacity);
      r.read("priority_alpha", rl.priority_alpha);
      r.read("beta_start", rl.beta_start);
      r.read("beta_end", rl.beta_end);
      std::string mode = "constrained";
      r.read("exploration", mode);
      rl.exploration = parse_exploration(mode);
      r.finish();
      rl.validate();
    }
    if (s.has("ga")) {
      Section g = s.child("ga");
      g.read("population", cfg.ga.population);
      g.read("generations", cfg.ga.generations);
      g.read("crossover_probability", cfg.ga.crossover_probability);
      g.read("mutation_probability", cfg.ga.mutation_probability);
      g.finish();
      cfg.ga.validate();
    }
    if (s.has("rg")) {
      Section g = s.child("rg");
      g.read("depth", cfg.rg.depth);
      g.read("budget_step", cfg.rg.budget_step);
      g.finish();
      if (cfg.rg.depth < 0) throw LoadError("config: rg depth must be >= 0");
    }
    if (s.has("brute")) {
      Section b = s.child("brute");
      b.read("time_limit_s", cfg.brute.time_limit_s);
      b.finish();
    }
    s.finish();
  }

  top.read("seeds", cfg.seeds);
  if (cfg.seeds.empty()) throw LoadError("config: seeds must not be empty");
  top.read("output", cfg.output_dir);

  if (top.has("bench")) {
    Section b = top.child("bench");
    b.read("solvers", cfg.bench_solvers);
    b.read("budgets", cfg.bench_budgets);
    b.finish();
    for (const auto& name : cfg.bench_solvers)
      if (std::find(solver_names().begin(), solver_names().end(), name) == solver_names().end())
        throw LoadError("config: unknown solver '" + name + "' in bench.solvers");
  }

  if (top.has("transfer")) {
    Section t = top.child("transfer");
    Endpoints e{cfg.instance.start, cfg.instance.terminal, cfg.instance.budget};
    t.read("start", e.start);
    t.read("terminal", e.terminal);
    t.read("budget", e.budget);
    t.finish();
    cfg.transfer = e;
  }
  top.finish();
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& filename) {
  std::ifstream f(filename);
  if (!f) throw LoadError("cannot open config '" + filename.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), filename.parent_path());
}

Experiment build_experiment(const ExperimentConfig& cfg) {
  Experiment exp;
  const auto& in = cfg.instance;
  if (in.grid) {
    const auto& g = *in.grid;
    exp.graph = std::make_shared<const SpatialGraph>(
        build_grid_graph((g.cols - 1) * g.spacing, (g.rows - 1) * g.spacing, g.spacing));
  } else {
    exp.graph = std::make_shared<const SpatialGraph>(load_graph_file(in.graph_file));
  }
  if (cfg.gp.synthetic) {
    const auto [lo, hi] = bounding_box(*exp.graph);
    exp.pilot = synthesize_pilot(*cfg.gp.synthetic, lo, hi);
  } else {
    exp.pilot = load_pilot_csv(cfg.gp.pilot_file);
  }
  exp.params = cfg.gp.kernel;
  if (cfg.gp.fit) {
    exp.fit = fit_hyperparameters(exp.pilot, cfg.gp.kernel, cfg.gp.fit_options);
    exp.params = exp.fit->params;
  }
  exp.model = std::make_shared<const GpModel>(exp.params, exp.pilot, *exp.graph);
  return exp;
}

ProblemInstance make_problem(const Experiment& exp, const Endpoints& ends, double sample_spacing) {
  return ProblemInstance(exp.graph, exp.model, ends.start, ends.terminal, ends.budget,
                         sample_spacing);
}

}  // namespace ipp::cli
