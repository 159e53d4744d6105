#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ipp/graph.hpp"

namespace ipp {

/// Squared-exponential kernel hyperparameters.
struct KernelParams {
  double signal_variance = 1.0;
  double lengthscale = 1.0;
  double noise_variance = 0.01;

  void validate() const;
};

struct PilotData {
  std::vector<Point2> locations;
  std::vector<double> values;

  std::size_t size() const { return locations.size(); }
  double mean() const;
};

/// Header `x,y,value`. Throws LoadError naming the line on malformed rows.
PilotData parse_pilot_csv(std::string_view text);
PilotData load_pilot_csv(const std::string& filename);
std::string format_pilot_csv(const PilotData& pilot);

double kernel(const KernelParams& params, const Point2& p, const Point2& q);

/// K(a, b) for the noise-free kernel.
Eigen::MatrixXd kernel_matrix(const KernelParams& params, std::span<const Point2> a,
                              std::span<const Point2> b);

/// Log-determinant of an SPD matrix via Cholesky. `jitter` is added to the
/// diagonal first and escalated x10 up to `max_jitter` when the factorization
/// fails. Returns the jitter that was finally used through `used_jitter`.
double spd_log_det(const Eigen::MatrixXd& a, double jitter, double max_jitter,
                   double* used_jitter = nullptr);

/// 0.5 ln|cov| + n/2 (1 + ln 2 pi), in nats.
double differential_entropy(const Eigen::MatrixXd& cov);

struct LmlValue {
  double value = 0.0;
  /// Derivatives w.r.t. (ln signal_variance, ln lengthscale, ln noise_variance).
  std::array<double, 3> gradient{};
};

/// Gaussian log marginal likelihood of the pilot values around their mean.
double log_marginal_likelihood(const KernelParams& params, const PilotData& pilot);
LmlValue log_marginal_likelihood_with_gradient(const KernelParams& params,
                                               const PilotData& pilot);

struct FitOptions {
  int starts = 5;
  int max_iterations = 300;
  std::uint64_t seed = 0;
  /// Standard deviation of the log-space perturbation applied to restarts.
  double restart_spread = 0.5;
};

struct FitResult {
  KernelParams params;
  double log_likelihood = 0.0;
  double initial_log_likelihood = 0.0;
  bool degenerate = false;
  int iterations = 0;
};

/// Multi-start gradient ascent on the log marginal likelihood in log-parameter
/// space. The first start is `init` itself, so the result never scores below it.
FitResult fit_hyperparameters(const PilotData& pilot, const KernelParams& init,
                              const FitOptions& options = {});

/// GP over the graph locations with pilot data as fixed conditioning context.
/// Immutable after construction.
class GpModel {
 public:
  GpModel(KernelParams params, PilotData pilot, std::vector<Point2> graph_locations);
  GpModel(KernelParams params, PilotData pilot, const SpatialGraph& graph);

  const KernelParams& params() const { return params_; }
  /// Noise variance after the 1e-6 * signal_variance floor.
  double noise_variance() const { return params_.noise_variance; }
  const PilotData& pilot() const { return pilot_; }
  double mean() const { return mean_; }
  const std::vector<Point2>& locations() const { return locations_; }
  std::size_t size() const { return locations_.size(); }

  double jitter() const { return jitter_; }
  double max_jitter() const { return 1e-4 * params_.signal_variance; }
  const Eigen::MatrixXd& prior_covariance() const { return prior_; }
  /// H(y_V) under the prior.
  double prior_entropy() const;
  double prior_log_det() const { return prior_log_det_; }

 private:
  KernelParams params_;
  PilotData pilot_;
  double mean_ = 0.0;
  std::vector<Point2> locations_;
  Eigen::MatrixXd prior_;
  double jitter_ = 0.0;
  double prior_log_det_ = 0.0;
};

double log_marginal_likelihood(const GpModel& model);

/// Posterior covariance of y_V given noisy observations at `samples` (pilot
/// data is not included). Solved through a Cholesky factorization.
Eigen::MatrixXd posterior_covariance(const GpModel& model, std::span<const Point2> samples);

/// Incrementally conditioned posterior over the graph locations. Starts from
/// the pilot locations; appending points extends the Cholesky factor of the
/// observation Gram matrix by one row per point. Copyable, so callers can
/// branch a partially built evaluator.
class MiEvaluator {
 public:
  explicit MiEvaluator(const GpModel& model);

  void append(const Point2& p);
  void append(std::span<const Point2> points);

  /// Number of conditioning points, pilot included.
  std::size_t size() const { return count_; }
  /// MI(y_V ; y_conditioning) in nats.
  double mutual_information() const;
  /// Posterior covariance over y_V given every conditioning point.
  const Eigen::MatrixXd& covariance() const { return sigma_; }

 private:
  void reserve(std::size_t rows);

  const GpModel* model_;
  std::vector<Point2> points_;
  Eigen::MatrixXd chol_;   // lower factor of K_SS + noise I, leading count_ x count_ block
  Eigen::MatrixXd cross_;  // L^-1 K_SV, leading count_ rows
  Eigen::MatrixXd sigma_;
  std::size_t count_ = 0;
  mutable double cached_mi_ = 0.0;
  mutable bool mi_valid_ = false;
};

/// MI(y_V ; y_points U y_D).
double mi_for_points(const GpModel& model, std::span<const Point2> points);

/// f_D(path): MI between y_V and the samples along the path plus pilot data.
double mi_reward(const GpModel& model, const SpatialGraph& g, std::span<const VertexId> path,
                 double spacing);

/// f_D(path + [a]) - f_D(path).
double incremental_reward(const GpModel& model, const SpatialGraph& g,
                          std::span<const VertexId> path, VertexId a, double spacing);

/// Per-vertex differential entropy of the pilot-conditioned marginal.
std::vector<double> vertex_entropies(const GpModel& model);

}  // namespace ipp
