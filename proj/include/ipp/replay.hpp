#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "ipp/env.hpp"

namespace ipp {

/// Binary sum tree over a fixed number of leaves; supports O(log n) priority
/// updates and prefix-sum lookup.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  double total() const { return nodes_[1]; }
  double get(std::size_t leaf) const { return nodes_[base_ + leaf]; }
  void set(std::size_t leaf, double value);
  /// Leaf whose cumulative range contains `mass`, for mass in [0, total()).
  std::size_t find(double mass) const;

 private:
  std::size_t capacity_;
  std::size_t base_;
  std::vector<double> nodes_;
};

struct ReplaySample {
  std::vector<std::size_t> slots;
  std::vector<double> weights;  // importance weights, max-normalized
};

/// Prioritized experience replay: P(i) ~ p_i^alpha, importance weight
/// (N P(i))^-beta. Ring storage, oldest transition evicted first.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, double alpha = 0.6);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  double alpha() const { return alpha_; }

  /// New transitions enter with the largest priority seen so far.
  void push(Transition t);
  const Transition& at(std::size_t slot) const { return items_.at(slot); }
  double priority(std::size_t slot) const;

  ReplaySample sample(std::size_t batch, double beta, std::mt19937_64& rng) const;
  /// `td_error` magnitudes become priorities |delta| + epsilon.
  void update_priorities(std::span<const std::size_t> slots, std::span<const double> td_errors);

 private:
  std::size_t capacity_;
  double alpha_;
  double max_priority_ = 1.0;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  std::vector<Transition> items_;
  SumTree tree_;
};

}  // namespace ipp
