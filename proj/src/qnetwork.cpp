#include "ipp/qnetwork.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ipp/errors.hpp"

namespace ipp {

namespace {

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  return (1.0 + (-x).exp()).inverse();
}

}  // namespace

Normalization Normalization::from_graph(const SpatialGraph& g) {
  double xmin = g.position(0).x, xmax = xmin, ymin = g.position(0).y, ymax = ymin;
  for (const auto& p : g.positions()) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  Normalization n;
  n.x_offset = 0.5 * (xmin + xmax);
  n.y_offset = 0.5 * (ymin + ymax);
  n.x_scale = xmax > xmin ? 2.0 / (xmax - xmin) : 0.0;
  n.y_scale = ymax > ymin ? 2.0 / (ymax - ymin) : 0.0;
  return n;
}

std::size_t QNetwork::parameter_count(int hidden, int outputs) {
  const auto h = static_cast<std::size_t>(hidden);
  const auto v = static_cast<std::size_t>(outputs);
  return 4 * h * 2 + 4 * h * h + 4 * h + v * h + v;
}

QNetwork::QNetwork(int hidden, int outputs, Normalization norm, std::uint64_t seed)
    : hidden_(hidden), outputs_(outputs), norm_(norm) {
  if (hidden < 1 || outputs < 1) throw InvalidArgument("network sizes must be positive");
  params_.resize(parameter_count(hidden, outputs));
  std::mt19937_64 rng(seed);
  const double k = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::uniform_real_distribution<double> u(-k, k);
  for (auto& p : params_) p = u(rng);
}

QNetwork QNetwork::zeros(int hidden, int outputs, Normalization norm) {
  QNetwork net(hidden, outputs, norm, 0);
  std::fill(net.params_.begin(), net.params_.end(), 0.0);
  return net;
}

QNetwork::Views QNetwork::views() const {
  const Eigen::Index h = hidden_, v = outputs_;
  const double* p = params_.data();
  Views out{CMap(p, 4 * h, 2), CMap(p + 8 * h, 4 * h, h), CVec(p + 8 * h + 4 * h * h, 4 * h),
            CMap(p + 12 * h + 4 * h * h, v, h), CVec(p + 12 * h + 4 * h * h + v * h, v)};
  return out;
}

std::vector<Point2> QNetwork::normalized_table(const SpatialGraph& g) const {
  std::vector<Point2> out;
  out.reserve(g.size());
  for (const auto& p : g.positions()) out.push_back(norm_.apply(p));
  return out;
}

Eigen::VectorXd QNetwork::forward(std::span<const Point2> coords) const {
  if (coords.empty()) throw InvalidArgument("Q-network input sequence is empty");
  std::vector<Point2> table;
  std::vector<VertexId> path;
  table.reserve(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    table.push_back(norm_.apply(coords[i]));
    path.push_back(static_cast<VertexId>(i));
  }
  return forward(path, table);
}

Eigen::VectorXd QNetwork::forward(std::span<const VertexId> path,
                                  std::span<const Point2> table) const {
  if (path.empty()) throw InvalidArgument("Q-network input sequence is empty");
  const auto w = views();
  const Eigen::Index h = hidden_;
  Eigen::VectorXd hs = Eigen::VectorXd::Zero(h), cs = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd z(4 * h);
  for (VertexId v : path) {
    const auto& x = table[static_cast<std::size_t>(v)];
    z.noalias() = w.b + w.wx.col(0) * x.x + w.wx.col(1) * x.y;
    z.noalias() += w.wh * hs;
    const Eigen::ArrayXd ig = sigmoid(z.segment(0, h).array());
    const Eigen::ArrayXd fg = sigmoid(z.segment(h, h).array());
    const Eigen::ArrayXd gg = z.segment(2 * h, h).array().tanh();
    const Eigen::ArrayXd og = sigmoid(z.segment(3 * h, h).array());
    cs = (fg * cs.array() + ig * gg).matrix();
    hs = (og * cs.array().tanh()).matrix();
  }
  return w.wo * hs + w.bo;
}

void QNetwork::forward_batch(std::span<const std::vector<VertexId>> paths,
                             std::span<const Point2> table, LstmTape& tape) const {
  const int n = static_cast<int>(paths.size());
  if (n == 0) throw InvalidArgument("empty batch");
  tape.order.resize(static_cast<std::size_t>(n));
  std::iota(tape.order.begin(), tape.order.end(), 0);
  std::stable_sort(tape.order.begin(), tape.order.end(), [&](int a, int b) {
    return paths[static_cast<std::size_t>(a)].size() > paths[static_cast<std::size_t>(b)].size();
  });
  tape.column_of.assign(static_cast<std::size_t>(n), 0);
  tape.lengths.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int idx = tape.order[static_cast<std::size_t>(k)];
    tape.column_of[static_cast<std::size_t>(idx)] = k;
    tape.lengths[static_cast<std::size_t>(k)] =
        static_cast<int>(paths[static_cast<std::size_t>(idx)].size());
    if (tape.lengths[static_cast<std::size_t>(k)] == 0)
      throw InvalidArgument("Q-network input sequence is empty");
  }
  const int steps = tape.lengths[0];
  const auto su = static_cast<std::size_t>(steps);
  tape.active.resize(su);
  tape.inputs.resize(su);
  tape.gates.resize(su);
  tape.cells.resize(su);
  tape.tanh_cells.resize(su);
  tape.hidden.resize(su);

  const auto w = views();
  const Eigen::Index h = hidden_;
  int active = n;
  for (int t = 0; t < steps; ++t) {
    while (active > 0 && tape.lengths[static_cast<std::size_t>(active - 1)] <= t) --active;
    const auto ts = static_cast<std::size_t>(t);
    tape.active[ts] = active;
    auto& x = tape.inputs[ts];
    x.resize(2, active);
    for (int k = 0; k < active; ++k) {
      const auto& path = paths[static_cast<std::size_t>(tape.order[static_cast<std::size_t>(k)])];
      const auto& p = table[static_cast<std::size_t>(path[ts])];
      x(0, k) = p.x;
      x(1, k) = p.y;
    }
    auto& z = tape.gates[ts];
    z.noalias() = w.wx * x;
    z.colwise() += w.b;
    if (t > 0) z.noalias() += w.wh * tape.hidden[ts - 1].leftCols(active);
    z.topRows(h) = sigmoid(z.topRows(h).array()).matrix();
    z.middleRows(h, h) = sigmoid(z.middleRows(h, h).array()).matrix();
    z.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
    z.bottomRows(h) = sigmoid(z.bottomRows(h).array()).matrix();

    auto& c = tape.cells[ts];
    c = (z.topRows(h).array() * z.middleRows(2 * h, h).array()).matrix();
    if (t > 0)
      c.array() += z.middleRows(h, h).array() * tape.cells[ts - 1].leftCols(active).array();
    tape.tanh_cells[ts] = c.array().tanh().matrix();
    tape.hidden[ts] = (z.bottomRows(h).array() * tape.tanh_cells[ts].array()).matrix();
  }
}

Eigen::VectorXd QNetwork::readout(const LstmTape& tape, int sequence, int step) const {
  const int col = tape.column_of.at(static_cast<std::size_t>(sequence));
  if (step < 0 || step >= tape.lengths[static_cast<std::size_t>(col)])
    throw InvalidArgument("readout step outside the sequence");
  const auto w = views();
  return w.wo * tape.hidden[static_cast<std::size_t>(step)].col(col) + w.bo;
}

void QNetwork::backward(const LstmTape& tape, std::span<const Readout> seeds,
                        std::vector<double>& grad) const {
  grad.assign(params_.size(), 0.0);
  const Eigen::Index h = hidden_, v = outputs_;
  double* g = grad.data();
  Map gwx(g, 4 * h, 2), gwh(g + 8 * h, 4 * h, h), gwo(g + 12 * h + 4 * h * h, v, h);
  Eigen::Map<Eigen::VectorXd> gb(g + 8 * h + 4 * h * h, 4 * h),
      gbo(g + 12 * h + 4 * h * h + v * h, v);
  const auto w = views();

  const int steps = static_cast<int>(tape.hidden.size());
  const int n = static_cast<int>(tape.order.size());
  // Gradient injected into hidden state (step, column).
  std::vector<Eigen::MatrixXd> inject(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t)
    inject[static_cast<std::size_t>(t)] =
        Eigen::MatrixXd::Zero(h, tape.active[static_cast<std::size_t>(t)]);
  for (const auto& s : seeds) {
    const int col = tape.column_of.at(static_cast<std::size_t>(s.sequence));
    const auto ts = static_cast<std::size_t>(s.step);
    gwo.row(s.output) += s.grad * tape.hidden[ts].col(col).transpose();
    gbo(s.output) += s.grad;
    inject[ts].col(col) += s.grad * w.wo.row(s.output).transpose();
  }

  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(h, n), dc = Eigen::MatrixXd::Zero(h, n);
  Eigen::MatrixXd dz;
  for (int t = steps - 1; t >= 0; --t) {
    const auto ts = static_cast<std::size_t>(t);
    const int a = tape.active[ts];
    const auto& z = tape.gates[ts];
    auto dhb = dh.leftCols(a);
    auto dcb = dc.leftCols(a);
    dhb += inject[ts];
    const auto ig = z.topRows(h).array();
    const auto fg = z.middleRows(h, h).array();
    const auto gg = z.middleRows(2 * h, h).array();
    const auto og = z.bottomRows(h).array();
    const auto tc = tape.tanh_cells[ts].array();

    dcb.array() += dhb.array() * og * (1.0 - tc * tc);
    dz.resize(4 * h, a);
    dz.bottomRows(h) = (dhb.array() * tc * og * (1.0 - og)).matrix();
    dz.topRows(h) = (dcb.array() * gg * ig * (1.0 - ig)).matrix();
    dz.middleRows(2 * h, h) = (dcb.array() * ig * (1.0 - gg * gg)).matrix();
    if (t > 0) {
      dz.middleRows(h, h) =
          (dcb.array() * tape.cells[ts - 1].leftCols(a).array() * fg * (1.0 - fg)).matrix();
    } else {
      dz.middleRows(h, h).setZero();
    }
    gwx.noalias() += dz * tape.inputs[ts].transpose();
    gb.noalias() += dz.rowwise().sum();
    if (t > 0) {
      gwh.noalias() += dz * tape.hidden[ts - 1].leftCols(a).transpose();
      dhb.noalias() = w.wh.transpose() * dz;
      dcb.array() *= fg;
    }
  }
}

Eigen::VectorXd masked_q(const Eigen::VectorXd& q, const SpatialGraph& g, VertexId current) {
  Eigen::VectorXd out = q.array() + kMaskPenalty;
  for (const auto& n : g.neighbors(current)) out(n.vertex) = q(n.vertex);
  return out;
}

VertexId masked_argmax(const Eigen::VectorXd& q, const SpatialGraph& g, VertexId current) {
  VertexId best = -1;
  double best_q = 0.0;
  for (const auto& n : g.neighbors(current)) {
    if (best < 0 || q(n.vertex) > best_q) {
      best = n.vertex;
      best_q = q(n.vertex);
    }
  }
  if (best < 0) throw ContractViolation("vertex has no neighbors");
  return best;
}

AdamOptimizer::AdamOptimizer(std::size_t n, double lr, double clip_norm)
    : lr_(lr), clip_(clip_norm), m_(n, 0.0), v_(n, 0.0) {}

double AdamOptimizer::step(std::span<double> params, std::vector<double>& grad) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  const double scale = (clip_ > 0.0 && norm > clip_) ? clip_ / norm : 1.0;
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i] * scale;
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
  return norm;
}

}  // namespace ipp
