#include <cmath>

#include "ipp/gp.hpp"

namespace ipp {

MiEvaluator::MiEvaluator(const GpModel& model) : model_(&model) {
  sigma_ = model.prior_covariance();
  reserve(model.pilot().size() + 16);
  append(model.pilot().locations);
}

void MiEvaluator::reserve(std::size_t rows) {
  const auto cap = static_cast<Eigen::Index>(rows);
  if (chol_.rows() >= cap) return;
  const auto n = static_cast<Eigen::Index>(model_->size());
  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(cap, cap);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(cap, n);
  const auto m = static_cast<Eigen::Index>(count_);
  if (m > 0) {
    chol.topLeftCorner(m, m) = chol_.topLeftCorner(m, m);
    cross.topRows(m) = cross_.topRows(m);
  }
  chol_ = std::move(chol);
  cross_ = std::move(cross);
}

void MiEvaluator::append(const Point2& p) {
  if (count_ + 1 > static_cast<std::size_t>(chol_.rows())) reserve(2 * count_ + 16);
  const auto& params = model_->params();
  const auto m = static_cast<Eigen::Index>(count_);
  const auto n = static_cast<Eigen::Index>(model_->size());

  // New row of L: solve L l = k(S, p).
  Eigen::VectorXd l(m);
  for (Eigen::Index i = 0; i < m; ++i) l(i) = kernel(params, points_[static_cast<std::size_t>(i)], p);
  if (m > 0) chol_.topLeftCorner(m, m).triangularView<Eigen::Lower>().solveInPlace(l);
  const double d2 = params.signal_variance + model_->noise_variance() - l.squaredNorm();
  if (!(d2 > 0.0) || !std::isfinite(d2))
    throw NumericalError("observation Gram matrix lost positive definiteness");
  const double d = std::sqrt(d2);

  // New row of W = L^-1 K_SV.
  Eigen::RowVectorXd w(n);
  const auto& locs = model_->locations();
  for (Eigen::Index j = 0; j < n; ++j) w(j) = kernel(params, p, locs[static_cast<std::size_t>(j)]);
  if (m > 0) w.noalias() -= l.transpose() * cross_.topRows(m);
  w /= d;

  if (m > 0) chol_.row(m).head(m) = l.transpose();
  chol_(m, m) = d;
  cross_.row(m) = w;
  // Symmetric rank-1 downdate; w_i * w_j is bitwise symmetric.
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) sigma_(i, j) -= w(i) * w(j);

  points_.push_back(p);
  ++count_;
  mi_valid_ = false;
}

void MiEvaluator::append(std::span<const Point2> points) {
  if (count_ + points.size() > static_cast<std::size_t>(chol_.rows()))
    reserve(std::max(2 * count_, count_ + points.size()) + 16);
  for (const auto& p : points) append(p);
}

double MiEvaluator::mutual_information() const {
  if (!mi_valid_) {
    const double post = spd_log_det(sigma_, model_->jitter(), model_->max_jitter());
    cached_mi_ = 0.5 * (model_->prior_log_det() - post);
    mi_valid_ = true;
  }
  return cached_mi_;
}

}  // namespace ipp
