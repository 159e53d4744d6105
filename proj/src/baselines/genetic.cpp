#include <algorithm>
#include <chrono>
#include <map>

#include "ipp/baselines.hpp"

namespace ipp {

void GaConfig::validate() const {
  if (population < 2) throw InvalidArgument("GA population must be at least 2");
  if (generations < 1) throw InvalidArgument("GA generations must be positive");
  if (crossover_probability < 0.0 || crossover_probability > 1.0)
    throw InvalidArgument("GA crossover probability outside [0,1]");
  if (mutation_probability < 0.0 || mutation_probability > 1.0)
    throw InvalidArgument("GA mutation probability outside [0,1]");
}

namespace {

using Walk = std::vector<VertexId>;

class Genetic {
 public:
  Genetic(const ProblemInstance& inst, const GaConfig& cfg) : inst_(inst), cfg_(cfg), rng_(cfg.seed) {}

  Walk run() {
    std::vector<Walk> pop;
    for (int i = 0; i < cfg_.population; ++i) pop.push_back(complete({inst_.start()}));
    std::vector<double> fit = evaluate(pop);
    for (int gen = 1; gen < cfg_.generations; ++gen) {
      const auto elite = static_cast<std::size_t>(
          std::max_element(fit.begin(), fit.end()) - fit.begin());
      std::vector<Walk> next{pop[elite]};
      std::uniform_real_distribution<double> u(0.0, 1.0);
      while (next.size() < pop.size()) {
        Walk child = pop[tournament(fit)];
        if (u(rng_) < cfg_.crossover_probability) child = crossover(child, pop[tournament(fit)]);
        if (u(rng_) < cfg_.mutation_probability) child = mutate(child);
        next.push_back(std::move(child));
      }
      pop = std::move(next);
      fit = evaluate(pop);
    }
    const auto best = static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
    return pop[best];
  }

 private:
  std::vector<double> evaluate(const std::vector<Walk>& pop) {
    std::vector<double> fit;
    fit.reserve(pop.size());
    for (const auto& w : pop) {
      auto it = cache_.find(w);
      if (it == cache_.end()) it = cache_.emplace(w, inst_.reward(w)).first;
      fit.push_back(it->second);
    }
    return fit;
  }

  std::size_t tournament(const std::vector<double>& fit) {
    std::uniform_int_distribution<std::size_t> pick(0, fit.size() - 1);
    const std::size_t a = pick(rng_), b = pick(rng_);
    if (fit[a] != fit[b]) return fit[a] > fit[b] ? a : b;
    return std::min(a, b);
  }

  // Replays `prefix` and finishes it with exploration actions.
  Walk complete(const Walk& prefix) {
    Episode ep(inst_);
    for (std::size_t i = 1; i < prefix.size(); ++i) ep.step(prefix[i]);
    while (!ep.done()) ep.step(ep.explore_action(rng_));
    return ep.state().path;
  }

  Walk crossover(const Walk& a, const Walk& b) {
    std::vector<std::pair<std::size_t, std::size_t>> cuts;
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
      for (std::size_t j = 0; j + 1 < b.size(); ++j)
        if (a[i] == b[j]) cuts.emplace_back(i, j);
    if (cuts.empty()) return a;
    std::uniform_int_distribution<std::size_t> pick(0, cuts.size() - 1);
    const auto [i, j] = cuts[pick(rng_)];
    Walk child(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    child.insert(child.end(), b.begin() + static_cast<std::ptrdiff_t>(j) + 1, b.end());
    if (path_cost(inst_.graph(), child) > inst_.budget() + budget_tolerance(inst_.budget())) {
      child.resize(i + 1);
      const auto leg = inst_.graph().shortest_route(a[i], inst_.terminal());
      child.insert(child.end(), leg.begin() + 1, leg.end());
    }
    return child;
  }

  Walk mutate(const Walk& w) {
    if (w.size() < 2) return w;
    std::uniform_int_distribution<std::size_t> pick(0, w.size() - 2);
    const std::size_t k = pick(rng_);
    return complete(Walk(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k) + 1));
  }

  const ProblemInstance& inst_;
  GaConfig cfg_;
  Rng rng_;
  std::map<Walk, double> cache_;
};

}  // namespace

PlanResult genetic(const ProblemInstance& inst, const GaConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Genetic ga(inst, cfg);
  Walk best = ga.run();
  const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  PlanResult r = make_result(inst, "ga", std::move(best), el);
  r.seed = cfg.seed;
  r.evaluations = static_cast<long long>(cfg.population) * cfg.generations;
  return r;
}

}  // namespace ipp
