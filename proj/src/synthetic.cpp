#include "ipp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ipp/errors.hpp"

namespace ipp {

PilotData synthesize_pilot(const SyntheticField& field, Point2 lo, Point2 hi) {
  field.params.validate();
  if (field.count < 1) throw InvalidArgument("synthetic field needs at least one pilot point");
  std::mt19937_64 rng(field.seed);
  std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
  std::normal_distribution<double> z(0.0, 1.0);

  PilotData pilot;
  for (int i = 0; i < field.count; ++i) pilot.locations.push_back({ux(rng), uy(rng)});
  const Eigen::MatrixXd k = kernel_matrix(field.params, pilot.locations, pilot.locations);
  const auto n = k.rows();
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (double jitter = 1e-10 * field.params.signal_variance;; jitter *= 10.0) {
    llt.compute(k + jitter * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) break;
    if (jitter > 1e-4 * field.params.signal_variance)
      throw NumericalError("synthetic field covariance is not positive definite");
  }
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = z(rng);
  const Eigen::VectorXd f = llt.matrixL() * e;
  const double noise_sd = std::sqrt(field.params.noise_variance);
  for (Eigen::Index i = 0; i < n; ++i) pilot.values.push_back(field.mean + f(i) + noise_sd * z(rng));
  return pilot;
}

std::pair<Point2, Point2> bounding_box(const SpatialGraph& g) {
  Point2 lo = g.position(0), hi = lo;
  for (VertexId v = 1; v < static_cast<VertexId>(g.size()); ++v) {
    const auto p = g.position(v);
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  return {lo, hi};
}

ProblemInstance make_instance(std::shared_ptr<const SpatialGraph> graph, const KernelParams& params,
                              PilotData pilot, VertexId start, VertexId terminal, double budget,
                              double sample_spacing) {
  auto model = std::make_shared<const GpModel>(params, std::move(pilot), *graph);
  return ProblemInstance(std::move(graph), std::move(model), start, terminal, budget, sample_spacing);
}

ProblemInstance make_grid_instance(int cols, int rows, double spacing, const SyntheticField& field,
                                   VertexId start, VertexId terminal, double budget,
                                   double sample_spacing) {
  if (cols < 1 || rows < 1) throw InvalidArgument("grid needs at least one column and row");
  auto graph = std::make_shared<const SpatialGraph>(
      build_grid_graph((cols - 1) * spacing, (rows - 1) * spacing, spacing));
  const auto [lo, hi] = bounding_box(*graph);
  return make_instance(graph, field.params, synthesize_pilot(field, lo, hi), start, terminal, budget,
                       sample_spacing);
}

}  // namespace ipp
