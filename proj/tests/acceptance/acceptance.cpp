// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ipp/baselines.hpp"
#include "ipp/errors.hpp"
#include "ipp/qlearn.hpp"
#include "ipp/synthetic.hpp"

using namespace ipp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SyntheticField field(std::uint64_t seed, int count = 12) {
  SyntheticField f;
  f.seed = seed;
  f.count = count;
  return f;
}

// Random endpoints and a budget admitting between `lo` and `hi` walks.
ProblemInstance random_grid_instance(std::mt19937_64& rng, int cols, int rows, long long lo,
                                     long long hi) {
  const int n = cols * rows;
  for (;;) {
    const auto s = static_cast<VertexId>(rng() % n);
    const auto t = rng() % 4 == 0 ? s : static_cast<VertexId>(rng() % n);
    const int manhattan = std::abs(s % cols - t % cols) + std::abs(s / cols - t / cols);
    const double budget = manhattan + 2.0 + static_cast<double>(rng() % 7);
    auto inst = make_grid_instance(cols, rows, 1.0, field(rng()), s, t, budget);
    const long long count = count_paths(inst);
    if (count >= lo && count <= hi) return inst;
  }
}

TrainingConfig rl_config(int episodes, int hidden, std::uint64_t seed) {
  TrainingConfig c;
  c.episodes = episodes;
  c.hidden = hidden;
  c.seed = seed;
  // Decay over the first half of the run.
  c.epsilon.decay_epochs = std::max(1, episodes / c.epoch_size / 2);
  return c;
}

Outcome criterion1() {
  std::mt19937_64 rng(2024);
  int within = 0, total = 0;
  double worst_time = 0, worst_gap = 0;
  for (int k = 0; k < 20; ++k) {
    const int side = k < 10 ? 3 : 4;
    const auto inst = random_grid_instance(rng, side, side, 20, 10000);
    const auto bf = brute_force(inst);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rl = train(inst, rl_config(2000, 32, static_cast<std::uint64_t>(k)));
    const double el = seconds_since(t0);
    worst_time = std::max(worst_time, el);
    const double gap = rl.valid ? (bf.mi_total - rl.mi_total) / bf.mi_total : 1.0;
    worst_gap = std::max(worst_gap, gap);
    within += rl.valid && gap <= 0.02;
    ++total;
    std::cout << "  instance " << k << ": " << side << "x" << side << " s=" << inst.start()
              << " t=" << inst.terminal() << " B=" << inst.budget() << " paths=" << bf.evaluations
              << " brute=" << fmt("%.6f", bf.mi_total) << " rl=" << fmt("%.6f", rl.mi_total)
              << " gap=" << fmt("%.4f", gap) << " time=" << fmt("%.1fs", el) << "\n";
  }
  const bool pass = within * 10 >= total * 9 && worst_time < 300.0;
  return {pass, std::to_string(within) + "/" + std::to_string(total) +
                    " instances within 2% of brute force (need 90%), worst gap " +
                    fmt("%.4f", worst_gap) + ", slowest run " + fmt("%.1fs", worst_time)};
}

Outcome criterion2() {
  int seeds_ok = 0;
  bool all_valid = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = make_grid_instance(20, 3, 1.0, field(100 + seed, 15), 0, 19, 27.0);
    auto cfg = rl_config(1000, 16, seed);
    const auto con = train_network(inst, cfg);
    cfg.exploration = Exploration::Naive;
    const auto naive = train_network(inst, cfg);
    // Episodes driven purely by exploration actions must all complete.
    bool valid = true;
    int explored = 0;
    for (std::size_t e = 0; e < con.episode_valid.size(); ++e) {
      if (!con.episode_all_explore[e]) continue;
      ++explored;
      valid = valid && con.episode_valid[e] == 1;
    }
    // Fresh exploration-only rollouts from the reset state, as in the first episode.
    Rng rng(seed);
    for (int k = 0; k < 200; ++k) {
      Episode ep(inst);
      while (!ep.done()) ep.step(ep.explore_action(rng));
      valid = valid && ep.succeeded();
    }
    all_valid = all_valid && valid;
    bool higher = true;
    int worst_epoch = -1;
    for (std::size_t e = 9; e < con.result.epoch_rewards.size(); ++e) {
      if (!(con.result.epoch_rewards[e] > naive.result.epoch_rewards[e])) {
        higher = false;
        worst_epoch = static_cast<int>(e) + 1;
        break;
      }
    }
    seeds_ok += higher;
    double naive_valid = 0, naive_explored = 0;
    for (std::size_t e = 0; e < naive.episode_valid.size(); ++e) {
      if (!naive.episode_all_explore[e]) continue;
      naive_explored += 1;
      naive_valid += naive.episode_valid[e];
    }
    naive_valid /= std::max(1.0, naive_explored);
    std::cout << "  seed " << seed << ": constrained exploration episodes " << explored << " valid "
              << (valid ? "100%" : "<100%")
              << ", naive exploration valid " << fmt("%.1f%%", 100 * naive_valid) << ", final epoch reward "
              << fmt("%.4f", con.result.epoch_rewards.back()) << " vs "
              << fmt("%.4f", naive.result.epoch_rewards.back())
              << (higher ? "" : ", not higher at epoch " + std::to_string(worst_epoch)) << "\n";
    std::cout << "    epoch rewards constrained/naive:";
    for (std::size_t e = 0; e < con.result.epoch_rewards.size(); ++e)
      std::cout << " " << fmt("%.2f", con.result.epoch_rewards[e]) << "/"
                << fmt("%.2f", naive.result.epoch_rewards[e]);
    std::cout << "\n";
  }
  return {all_valid && seeds_ok >= 4,
          std::string(all_valid ? "constrained exploration episodes 100% valid"
                        : "some constrained exploration episode invalid") +
              ", higher mean epoch reward at every epoch >= 10 on " + std::to_string(seeds_ok) +
              "/5 seeds (need 4)"};
}

Outcome criterion3() {
  std::mt19937_64 rng(33);
  int wins = 0;
  for (int k = 0; k < 10; ++k) {
    const int side = 4 + k % 2;
    const auto s = static_cast<VertexId>(rng() % (side * side));
    const auto t = k % 3 == 0 ? s : static_cast<VertexId>(rng() % (side * side));
    const int manhattan = std::abs(s % side - t % side) + std::abs(s / side - t / side);
    const double budget = std::max(manhattan + 4.0, 2.0 * side + static_cast<double>(rng() % 5));
    const auto inst = make_grid_instance(side, side, 1.0, field(rng()), s, t, budget);
    const auto rl = train(inst, rl_config(5000, 32, static_cast<std::uint64_t>(k)));
    GaConfig gc;
    gc.seed = static_cast<std::uint64_t>(k);
    const auto ga = genetic(inst, gc);
    const bool win = rl.valid && rl.mi_total >= ga.mi_total - 1e-12;
    wins += win;
    std::cout << "  instance " << k << ": " << side << "x" << side << " s=" << s << " t=" << t
              << " B=" << budget << " rl=" << fmt("%.6f", rl.mi_total)
              << " ga=" << fmt("%.6f", ga.mi_total) << (win ? "" : " (ga ahead)") << "\n";
  }
  return {wins >= 7, "RL >= GA on " + std::to_string(wins) + "/10 instances (need 7)"};
}

Outcome criterion4() {
  std::mt19937_64 rng(4);
  double worst = 0;
  int penalized = 0;
  for (int e = 0; e < 1000; ++e) {
    const int cols = 3 + static_cast<int>(rng() % 3), rows = 2 + static_cast<int>(rng() % 3);
    const auto s = static_cast<VertexId>(rng() % (cols * rows));
    const auto t = static_cast<VertexId>(rng() % (cols * rows));
    const int manhattan = std::abs(s % cols - t % cols) + std::abs(s / cols - t / cols);
    const double budget = manhattan + static_cast<double>(rng() % 6);
    const auto inst = make_grid_instance(cols, rows, 1.0, field(rng(), 6), s, t, budget);
    Episode ep(inst, e % 2 ? Exploration::Naive : Exploration::Constrained);
    double sum = 0;
    while (!ep.done()) sum += ep.step(ep.explore_action(rng)).reward;
    double err;
    if (ep.succeeded()) {
      err = std::abs(sum - (inst.reward(ep.state().path) - inst.start_reward()));
    } else {
      ++penalized;
      err = std::abs(sum);
    }
    worst = std::max(worst, err);
  }
  return {worst <= 1e-9 && penalized > 0,
          "max telescoping error " + fmt("%.3g", worst) + " over 1000 episodes (" +
              std::to_string(penalized) + " voided)"};
}

Outcome criterion5() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 6.0);
  double worst_mono = 0, worst_diag = 0;
  for (int t = 0; t < 500; ++t) {
    const auto g = build_grid_graph(4.0, 3.0, 1.0);
    SyntheticField f = field(rng(), static_cast<int>(rng() % 8));
    f.params.lengthscale = 0.5 + 3.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    const auto [lo, hi] = bounding_box(g);
    const GpModel model(f.params, f.count > 0 ? synthesize_pilot(f, lo, hi) : PilotData{}, g);
    std::vector<Point2> pts;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int k = 0; k < n; ++k) pts.push_back({u(rng), u(rng)});
    const int cut = static_cast<int>(rng() % (n + 1));
    const std::span<const Point2> small(pts.data(), static_cast<std::size_t>(cut));
    const double a = mi_for_points(model, small), b = mi_for_points(model, pts);
    worst_mono = std::max(worst_mono, a - b);

    const auto post = posterior_covariance(model, pts);
    const auto& prior = model.prior_covariance();
    for (Eigen::Index i = 0; i < post.rows(); ++i)
      worst_diag = std::max(worst_diag, post(i, i) - prior(i, i));
    MiEvaluator ev(model);
    ev.append(pts);
    for (Eigen::Index i = 0; i < post.rows(); ++i)
      worst_diag = std::max(worst_diag, ev.covariance()(i, i) - prior(i, i));
  }
  return {worst_mono <= 1e-9 && worst_diag <= 1e-9,
          "max MI decrease " + fmt("%.3g", worst_mono) + ", max posterior-minus-prior variance " +
              fmt("%.3g", worst_diag) + " over 500 nested sets"};
}

double rel_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

Outcome criterion6() {
  std::mt19937_64 rng(6);
  double worst_bptt = 0;
  for (int p = 0; p < 50; ++p) {
    const auto g = build_grid_graph(2.0 + static_cast<double>(rng() % 2), 2.0, 1.0);
    const int v = static_cast<int>(g.size());
    QNetwork net(3 + static_cast<int>(rng() % 4), v, Normalization::from_graph(g), rng());
    const auto table = net.normalized_table(g);
    std::vector<std::vector<VertexId>> paths;
    for (int k = 0; k < 3; ++k) {
      std::vector<VertexId> w{static_cast<VertexId>(rng() % v)};
      const int len = 1 + static_cast<int>(rng() % 6);
      while (static_cast<int>(w.size()) < len) {
        const auto nb = g.neighbors(w.back());
        w.push_back(nb[rng() % nb.size()].vertex);
      }
      paths.push_back(w);
    }
    std::vector<Readout> seeds;
    std::normal_distribution<double> nd;
    for (int k = 0; k < 3; ++k)
      seeds.push_back({k, static_cast<int>(rng() % paths[k].size()), static_cast<int>(rng() % v), nd(rng)});
    auto loss = [&](const QNetwork& n) {
      LstmTape t;
      n.forward_batch(paths, table, t);
      double l = 0;
      for (const auto& s : seeds) l += s.grad * n.readout(t, s.sequence, s.step)(s.output);
      return l;
    };
    LstmTape tape;
    net.forward_batch(paths, table, tape);
    std::vector<double> grad;
    net.backward(tape, seeds, grad);
    const std::size_t i = rng() % net.parameter_count();
    const double h = 1e-6, keep = net.parameters()[i];
    net.parameters()[i] = keep + h;
    const double up = loss(net);
    net.parameters()[i] = keep - h;
    const double down = loss(net);
    net.parameters()[i] = keep;
    worst_bptt = std::max(worst_bptt, rel_error(grad[i], (up - down) / (2 * h)));
  }

  double worst_lml = 0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int p = 0; p < 50; ++p) {
    SyntheticField f = field(rng(), 10 + static_cast<int>(rng() % 40));
    const auto pilot = synthesize_pilot(f, {0, 0}, {10, 10});
    const KernelParams kp{0.2 + 3 * u(rng), 0.5 + 4 * u(rng), 0.005 + 0.3 * u(rng)};
    const auto lv = log_marginal_likelihood_with_gradient(kp, pilot);
    const double h = 1e-5;
    for (int k = 0; k < 3; ++k) {
      auto at = [&](double delta) {
        KernelParams q = kp;
        double* field = k == 0 ? &q.signal_variance : k == 1 ? &q.lengthscale : &q.noise_variance;
        *field *= std::exp(delta);
        return log_marginal_likelihood(q, pilot);
      };
      worst_lml = std::max(worst_lml, rel_error(lv.gradient[k], (at(h) - at(-h)) / (2 * h)));
    }
  }
  return {worst_bptt <= 1e-4 && worst_lml <= 1e-4,
          "max relative error: BPTT " + fmt("%.3g", worst_bptt) + ", log-likelihood " +
              fmt("%.3g", worst_lml) + " (50 points each)"};
}

Outcome criterion7() {
  // Tour on 6 x 6. Tour costs are even, so B0 = 20 gives effective targets 18 and 22.
  const double b0 = 20.0;
  const auto base = make_grid_instance(6, 6, 1.0, field(77, 15), 0, 0, b0);
  const auto pre = train_network(base, rl_config(1500, 32, 999));
  std::ostringstream detail;
  bool pass = true;
  for (double scale : {0.9, 1.1}) {
    const auto inst = base.with(0, 0, b0 * scale);
    int faster = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto cfg = rl_config(1000, 32, seed);
      const auto scratch = train_network(inst, cfg).result;
      const auto tuned = train_network(inst, cfg, &pre.network).result;
      const int reach = episodes_to_reach(tuned.best_trace, scratch.mi_total);
      const bool win = reach > 0 && reach < scratch.episodes_to_best;
      faster += win;
      std::cout << "  B=" << inst.budget() << " seed " << seed << ": scratch best "
                << fmt("%.6f", scratch.mi_total) << " at episode " << scratch.episodes_to_best
                << ", fine-tuned reaches it at " << reach << "\n";
    }
    pass = pass && faster >= 3;
    detail << "B0x" << scale << ": fine-tuned faster on " << faster << "/5 seeds; ";
  }
  detail << "(need 3/5 for each target)";
  return {pass, detail.str()};
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy * sxy / (sxx * syy);
}

Outcome criterion8() {
  // 13 x 2 grid: 26 vertices.
  const auto inst = make_grid_instance(13, 2, 1.0, field(8, 12), 0, 25, 18.0);
  auto timed = [&](int depth) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = recursive_greedy(inst, {depth, 0.0});
    return std::make_pair(seconds_since(t0), r);
  };
  double t1 = 0;
  for (int rep = 0; rep < 5; ++rep) t1 += timed(1).first / 5;
  const auto [t2, r2] = timed(2);
  const double ratio = t2 / t1;

  const auto tour = make_grid_instance(6, 6, 1.0, field(9, 15), 14, 14, 8.0);
  std::vector<double> budgets{8, 12, 16, 20, 24}, times;
  for (double b : budgets) {
    std::vector<double> reps;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      train(tour.with(14, 14, b), rl_config(300, 32, static_cast<std::uint64_t>(rep)));
      reps.push_back(seconds_since(t0));
    }
    std::sort(reps.begin(), reps.end());
    times.push_back(reps[1]);
    std::cout << "  rl B=" << b << ": median " << fmt("%.3fs", reps[1]) << "\n";
  }
  const double r2fit = r_squared(budgets, times);
  std::cout << "  rg I=1 " << fmt("%.4fs", t1) << ", I=2 " << fmt("%.4fs", t2) << " (mi "
            << fmt("%.6f", r2.mi_total) << ")\n";
  return {ratio > 5.0 && r2fit > 0.9,
          "RG I=2/I=1 runtime ratio " + fmt("%.1f", ratio) + " (need > 5); RL wall time vs budget R^2 " +
              fmt("%.4f", r2fit) + " (need > 0.9)"};
}

Outcome criterion9() {
  const auto inst = make_grid_instance(4, 4, 1.0, field(90, 10), 0, 15, 10.0);
  std::vector<std::pair<std::string, std::function<PlanResult()>>> solvers{
      {"rl", [&] { return train(inst, rl_config(300, 16, 5)); }},
      {"greedy", [&] { return greedy_tsp(inst); }},
      {"ga", [&] {
         GaConfig c;
         c.population = 40;
         c.generations = 10;
         c.seed = 5;
         return genetic(inst, c);
       }},
      {"rg", [&] { return recursive_greedy(inst); }},
      {"brute", [&] { return brute_force(inst); }},
  };
  std::vector<std::string> differing;
  for (const auto& [name, run] : solvers) {
    const auto a = run(), b = run();
    bool same = a.path == b.path && a.mi_total == b.mi_total && a.best_trace == b.best_trace;
    if (!same || !a.valid) differing.push_back(name);
  }
  std::string who;
  for (const auto& d : differing) who += " " + d;
  return {differing.empty(), differing.empty()
                                 ? "rl, greedy, ga, rg and brute reproduce identical paths"
                                 : "non-reproducible or invalid:" + who};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> which;
  app.add_option("--criterion", which, "criterion number(s), default all")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  std::cout << std::unitbuf;
  if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::function<Outcome()> table[] = {criterion1, criterion2, criterion3,
                                            criterion4, criterion5, criterion6,
                                            criterion7, criterion8, criterion9};
  int failed = 0;
  for (int c : which) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = table[c - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << "criterion " << c << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << "  [" << fmt("%.1fs", seconds_since(t0)) << "]" << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
