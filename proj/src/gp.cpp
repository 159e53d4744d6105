#include "ipp/gp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace ipp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)
constexpr double kNoiseFloor = 1e-6;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

bool parse_field(const std::string& raw, double& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

// Lower Cholesky factor with jitter escalation.
Eigen::LLT<Eigen::MatrixXd> factor_with_jitter(const Eigen::MatrixXd& a, double jitter,
                                               double max_jitter, double* used) {
  const Eigen::Index n = a.rows();
  double j = jitter;
  while (true) {
    Eigen::MatrixXd m = a;
    if (j > 0.0) m.diagonal().array() += j;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) {
      bool finite = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = llt.matrixLLT()(i, i);
        if (!(d > 0.0) || !std::isfinite(d)) finite = false;
      }
      if (finite) {
        if (used) *used = j;
        return llt;
      }
    }
    if (j >= max_jitter) break;
    j = j > 0.0 ? std::min(j * 10.0, max_jitter) : std::max(max_jitter * 1e-6, 1e-300);
  }
  throw NumericalError("matrix is not positive definite after jitter escalation");
}

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

void KernelParams::validate() const {
  if (!std::isfinite(signal_variance) || !(signal_variance > 0.0))
    throw InvalidArgument("signal_variance must be positive and finite");
  if (!std::isfinite(lengthscale) || !(lengthscale > 0.0))
    throw InvalidArgument("lengthscale must be positive and finite");
  if (!std::isfinite(noise_variance) || noise_variance < 0.0)
    throw InvalidArgument("noise_variance must be non-negative and finite");
}

double PilotData::mean() const {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

PilotData parse_pilot_csv(std::string_view text) {
  PilotData out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!header) {
      std::string h = trim(line);
      h.erase(std::remove(h.begin(), h.end(), ' '), h.end());
      if (h != "x,y,value") throw LoadError("expected header 'x,y,value'", lineno);
      header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    Point2 p;
    double v = 0.0;
    if (fields.size() != 3 || !parse_field(fields[0], p.x) || !parse_field(fields[1], p.y) ||
        !parse_field(fields[2], v))
      throw LoadError("malformed pilot row, expected three numeric fields", lineno);
    out.locations.push_back(p);
    out.values.push_back(v);
  }
  if (!header) throw LoadError("pilot CSV is empty");
  return out;
}

PilotData load_pilot_csv(const std::string& filename) {
  std::ifstream f(filename);
  if (!f) throw LoadError("cannot open pilot CSV '" + filename + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_pilot_csv(ss.str());
}

std::string format_pilot_csv(const PilotData& pilot) {
  std::ostringstream os;
  os << std::setprecision(17) << "x,y,value\n";
  for (std::size_t i = 0; i < pilot.size(); ++i)
    os << pilot.locations[i].x << ',' << pilot.locations[i].y << ',' << pilot.values[i] << '\n';
  return os.str();
}

double kernel(const KernelParams& params, const Point2& p, const Point2& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  const double r2 = dx * dx + dy * dy;
  return params.signal_variance * std::exp(-r2 / (2.0 * params.lengthscale * params.lengthscale));
}

Eigen::MatrixXd kernel_matrix(const KernelParams& params, std::span<const Point2> a,
                              std::span<const Point2> b) {
  Eigen::MatrixXd k(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel(params, a[i], b[j]);
  return k;
}

double spd_log_det(const Eigen::MatrixXd& a, double jitter, double max_jitter,
                   double* used_jitter) {
  return log_det_from_llt(factor_with_jitter(a, jitter, max_jitter, used_jitter));
}

double differential_entropy(const Eigen::MatrixXd& cov) {
  if (cov.rows() == 0 || cov.rows() != cov.cols())
    throw InvalidArgument("covariance must be square and non-empty");
  const double scale = cov.diagonal().cwiseAbs().mean();
  const double n = static_cast<double>(cov.rows());
  const double ld = spd_log_det(cov, 0.0, 1e-4 * std::max(scale, 1e-300));
  return 0.5 * ld + 0.5 * n * (1.0 + kLog2Pi);
}

LmlValue log_marginal_likelihood_with_gradient(const KernelParams& params,
                                               const PilotData& pilot) {
  params.validate();
  const auto n = static_cast<Eigen::Index>(pilot.size());
  if (n == 0) throw InvalidArgument("log marginal likelihood needs at least one pilot sample");
  const Eigen::MatrixXd kf = kernel_matrix(params, pilot.locations, pilot.locations);
  Eigen::MatrixXd k = kf;
  k.diagonal().array() += params.noise_variance;
  const auto llt = factor_with_jitter(k, 0.0, 1e-4 * params.signal_variance, nullptr);
  const double mu = pilot.mean();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = pilot.values[static_cast<std::size_t>(i)] - mu;
  const Eigen::VectorXd alpha = llt.solve(y);

  LmlValue out;
  out.value = -0.5 * y.dot(alpha) - 0.5 * log_det_from_llt(llt) -
              0.5 * static_cast<double>(n) * kLog2Pi;

  // d/dtheta = 0.5 tr((alpha alpha^T - K^-1) dK/dtheta)
  const Eigen::MatrixXd kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd inner = alpha * alpha.transpose() - kinv;
  const double l2 = params.lengthscale * params.lengthscale;
  double g_sv = 0.0, g_ls = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& p = pilot.locations[static_cast<std::size_t>(i)];
      const auto& q = pilot.locations[static_cast<std::size_t>(j)];
      const double r2 = (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y);
      g_sv += inner(i, j) * kf(i, j);
      g_ls += inner(i, j) * kf(i, j) * r2 / l2;
    }
  }
  out.gradient = {0.5 * g_sv, 0.5 * g_ls, 0.5 * params.noise_variance * inner.trace()};
  return out;
}

double log_marginal_likelihood(const KernelParams& params, const PilotData& pilot) {
  return log_marginal_likelihood_with_gradient(params, pilot).value;
}

namespace {

KernelParams from_log(const std::array<double, 3>& t) {
  return KernelParams{std::exp(t[0]), std::exp(t[1]), std::exp(t[2])};
}

struct AscentOutcome {
  std::array<double, 3> theta;
  double value;
  int iterations;
};

// Gradient ascent with an adaptive step; only improving moves are accepted.
AscentOutcome ascend(const PilotData& pilot, std::array<double, 3> theta, int max_iter) {
  auto clamp_theta = [](std::array<double, 3>& t) {
    t[0] = std::clamp(t[0], -30.0, 30.0);
    t[1] = std::clamp(t[1], -15.0, 15.0);
    t[2] = std::clamp(t[2], t[0] + std::log(1e-10), 30.0);
  };
  LmlValue cur;
  try {
    cur = log_marginal_likelihood_with_gradient(from_log(theta), pilot);
  } catch (const NumericalError&) {
    return {theta, -std::numeric_limits<double>::infinity(), 0};
  }
  double step = 0.1;
  int it = 0;
  for (; it < max_iter; ++it) {
    const auto& g = cur.gradient;
    const double gnorm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    if (gnorm < 1e-7 || step < 1e-12) break;
    bool accepted = false;
    while (step >= 1e-12) {
      std::array<double, 3> cand = theta;
      // Normalized direction keeps the first step bounded for large gradients.
      for (int k = 0; k < 3; ++k) cand[k] += step * g[k] / std::max(1.0, gnorm);
      clamp_theta(cand);
      try {
        auto next = log_marginal_likelihood_with_gradient(from_log(cand), pilot);
        if (std::isfinite(next.value) && next.value > cur.value) {
          theta = cand;
          cur = next;
          step *= 1.5;
          accepted = true;
          break;
        }
      } catch (const NumericalError&) {
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return {theta, cur.value, it};
}

}  // namespace

FitResult fit_hyperparameters(const PilotData& pilot, const KernelParams& init,
                              const FitOptions& options) {
  init.validate();
  if (pilot.size() < 3)
    throw InvalidArgument("hyperparameter fitting needs at least 3 pilot samples");
  FitResult result;
  const auto [lo, hi] = std::minmax_element(pilot.values.begin(), pilot.values.end());
  if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(*hi))) {
    result.params = init;
    result.params.noise_variance =
        std::max(init.noise_variance, kNoiseFloor * init.signal_variance);
    result.degenerate = true;
    result.log_likelihood = log_marginal_likelihood(result.params, pilot);
    result.initial_log_likelihood = log_marginal_likelihood(init, pilot);
    return result;
  }

  result.initial_log_likelihood = log_marginal_likelihood(init, pilot);
  result.params = init;
  result.log_likelihood = result.initial_log_likelihood;

  const std::array<double, 3> base{std::log(init.signal_variance), std::log(init.lengthscale),
                                   std::log(std::max(init.noise_variance,
                                                     1e-10 * init.signal_variance))};
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> perturb(0.0, options.restart_spread);
  for (int s = 0; s < options.starts; ++s) {
    std::array<double, 3> start = base;
    if (s > 0)
      for (auto& t : start) t += perturb(rng);
    const auto out = ascend(pilot, start, options.max_iterations);
    result.iterations += out.iterations;
    const double tol = 1e-10 * std::max(1.0, std::abs(result.log_likelihood));
    if (out.value > result.log_likelihood + tol) {
      result.log_likelihood = out.value;
      result.params = from_log(out.theta);
    }
  }
  return result;
}

GpModel::GpModel(KernelParams params, PilotData pilot, std::vector<Point2> graph_locations)
    : params_(params), pilot_(std::move(pilot)), locations_(std::move(graph_locations)) {
  params_.validate();
  if (pilot_.locations.size() != pilot_.values.size())
    throw InvalidArgument("pilot locations and values differ in length");
  if (locations_.empty()) throw InvalidArgument("GP model needs at least one graph location");
  params_.noise_variance =
      std::max(params_.noise_variance, kNoiseFloor * params_.signal_variance);
  mean_ = pilot_.mean();
  prior_ = kernel_matrix(params_, locations_, locations_);
  double used = 0.0;
  prior_log_det_ = spd_log_det(prior_, 1e-10 * params_.signal_variance, max_jitter(), &used);
  jitter_ = used;
}

GpModel::GpModel(KernelParams params, PilotData pilot, const SpatialGraph& graph)
    : GpModel(params, std::move(pilot), graph.positions()) {}

double GpModel::prior_entropy() const {
  return 0.5 * prior_log_det_ + 0.5 * static_cast<double>(size()) * (1.0 + kLog2Pi);
}

double log_marginal_likelihood(const GpModel& model) {
  return log_marginal_likelihood(model.params(), model.pilot());
}

Eigen::MatrixXd posterior_covariance(const GpModel& model, std::span<const Point2> samples) {
  if (samples.empty()) return model.prior_covariance();
  const auto& p = model.params();
  Eigen::MatrixXd kss = kernel_matrix(p, samples, samples);
  kss.diagonal().array() += model.noise_variance();
  const auto llt = factor_with_jitter(kss, 0.0, model.max_jitter(), nullptr);
  const Eigen::MatrixXd ksv = kernel_matrix(p, samples, model.locations());
  const Eigen::MatrixXd w = llt.matrixL().solve(ksv);
  Eigen::MatrixXd sigma = model.prior_covariance();
  sigma.noalias() -= w.transpose() * w;
  // Exact symmetry before any downstream factorization.
  return 0.5 * (sigma + sigma.transpose());
}

double mi_for_points(const GpModel& model, std::span<const Point2> points) {
  MiEvaluator ev(model);
  ev.append(points);
  return ev.mutual_information();
}

double mi_reward(const GpModel& model, const SpatialGraph& g, std::span<const VertexId> path,
                 double spacing) {
  return mi_for_points(model, sample_points_along_path(g, path, spacing));
}

double incremental_reward(const GpModel& model, const SpatialGraph& g,
                          std::span<const VertexId> path, VertexId a, double spacing) {
  if (path.empty()) throw InvalidArgument("incremental reward needs a non-empty path");
  if (!g.adjacent(path.back(), a))
    throw InvalidArgument("action " + std::to_string(a) + " is not adjacent to vertex " +
                          std::to_string(path.back()));
  MiEvaluator ev(model);
  ev.append(sample_points_along_path(g, path, spacing));
  const double before = ev.mutual_information();
  const double arc = path_cost(g, path);
  std::vector<Point2> extra;
  append_edge_samples(g, path.back(), a, arc, spacing, extra);
  ev.append(extra);
  return ev.mutual_information() - before;
}

std::vector<double> vertex_entropies(const GpModel& model) {
  MiEvaluator ev(model);
  const auto& s = ev.covariance();
  std::vector<double> out(model.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double var = std::max(s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)),
                                model.jitter() + 1e-300);
    out[i] = 0.5 * (1.0 + kLog2Pi + std::log(var));
  }
  return out;
}

}  // namespace ipp
