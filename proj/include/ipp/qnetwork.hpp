#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ipp/graph.hpp"

namespace ipp {

/// Affine map of raw coordinates (meters) onto [-1, 1] per axis.
struct Normalization {
  double x_offset = 0.0;
  double x_scale = 1.0;
  double y_offset = 0.0;
  double y_scale = 1.0;

  static Normalization from_graph(const SpatialGraph& g);
  Point2 apply(const Point2& p) const {
    return {(p.x - x_offset) * x_scale, (p.y - y_offset) * y_scale};
  }
  friend bool operator==(const Normalization&, const Normalization&) = default;
};

/// Masked-out entries receive this offset.
inline constexpr double kMaskPenalty = -1e6;

/// Activations recorded by a batched forward pass, consumed by backward().
/// Columns are ordered by decreasing sequence length so that the sequences
/// still running at step t always form a leading block.
struct LstmTape {
  std::vector<int> order;      // column -> caller index
  std::vector<int> column_of;  // caller index -> column
  std::vector<int> lengths;    // per column
  std::vector<int> active;     // per step: number of running columns
  std::vector<Eigen::MatrixXd> inputs;  // 2 x active
  std::vector<Eigen::MatrixXd> gates;   // 4H x active, post-activation [i f g o]
  std::vector<Eigen::MatrixXd> cells;   // H x active
  std::vector<Eigen::MatrixXd> tanh_cells;
  std::vector<Eigen::MatrixXd> hidden;  // H x active
};

/// Gradient seed for one readout: dLoss/dQ at step `step` of sequence `sequence`.
struct Readout {
  int sequence = 0;
  int step = 0;
  int output = 0;
  double grad = 0.0;
};

/// LSTM over a coordinate sequence followed by a linear map from the last
/// hidden state to one value per graph vertex. Parameters live in one flat
/// vector: [Wx (4H x 2) | Wh (4H x H) | b (4H) | Wo (V x H) | bo (V)], every
/// matrix column-major, gate blocks ordered input, forget, cell, output.
class QNetwork {
 public:
  QNetwork() = default;
  /// Uniform(-1/sqrt(H), 1/sqrt(H)) initialization from `seed`.
  QNetwork(int hidden, int outputs, Normalization norm, std::uint64_t seed);
  static QNetwork zeros(int hidden, int outputs, Normalization norm);

  int hidden_size() const { return hidden_; }
  int output_size() const { return outputs_; }
  const Normalization& normalization() const { return norm_; }
  std::size_t parameter_count() const { return params_.size(); }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  static std::size_t parameter_count(int hidden, int outputs);

  /// Q-values for a raw (meter) coordinate sequence. Throws on empty input.
  Eigen::VectorXd forward(std::span<const Point2> coords) const;
  /// Same, for a vertex sequence whose normalized coordinates are in `table`.
  Eigen::VectorXd forward(std::span<const VertexId> path, std::span<const Point2> table) const;

  /// Batched forward over vertex sequences; records every hidden state.
  void forward_batch(std::span<const std::vector<VertexId>> paths, std::span<const Point2> table,
                     LstmTape& tape) const;
  /// Q-values read from hidden state `step` (0-based) of sequence `sequence`.
  Eigen::VectorXd readout(const LstmTape& tape, int sequence, int step) const;
  /// Backpropagation through time from the seeded readouts; `grad` is overwritten.
  void backward(const LstmTape& tape, std::span<const Readout> seeds,
                std::vector<double>& grad) const;

  /// Every coordinate of the flat table, normalized.
  std::vector<Point2> normalized_table(const SpatialGraph& g) const;

 private:
  using Map = Eigen::Map<Eigen::MatrixXd>;
  using CMap = Eigen::Map<const Eigen::MatrixXd>;
  using CVec = Eigen::Map<const Eigen::VectorXd>;
  struct Views {
    CMap wx, wh;
    CVec b;
    CMap wo;
    CVec bo;
  };
  Views views() const;

  int hidden_ = 0;
  int outputs_ = 0;
  Normalization norm_;
  std::vector<double> params_;
};

/// Q_o + Q_m for the current vertex: zero offset on neighbors, kMaskPenalty elsewhere.
Eigen::VectorXd masked_q(const Eigen::VectorXd& q, const SpatialGraph& g, VertexId current);
/// Argmax over neighbors of `current`; ties go to the lowest vertex id.
VertexId masked_argmax(const Eigen::VectorXd& q, const SpatialGraph& g, VertexId current);

/// Adam with global gradient-norm clipping.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(std::size_t n, double lr, double clip_norm = 1.0);

  /// Returns the gradient norm before clipping.
  double step(std::span<double> params, std::vector<double>& grad);
  double learning_rate() const { return lr_; }

 private:
  double lr_ = 1e-3;
  double clip_ = 1.0;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long long t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace ipp
