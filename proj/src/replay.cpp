#include "ipp/replay.hpp"

#include <algorithm>
#include <cmath>

namespace ipp {

namespace {
constexpr double kPriorityEpsilon = 1e-6;
}

SumTree::SumTree(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidArgument("sum tree capacity must be positive");
  base_ = 1;
  while (base_ < capacity) base_ <<= 1;
  nodes_.assign(2 * base_, 0.0);
}

void SumTree::set(std::size_t leaf, double value) {
  if (leaf >= capacity_) throw InvalidArgument("sum tree leaf out of range");
  std::size_t i = base_ + leaf;
  nodes_[i] = value;
  // Recompute parents from children so that no drift accumulates.
  for (i >>= 1; i >= 1; i >>= 1) nodes_[i] = nodes_[2 * i] + nodes_[2 * i + 1];
}

std::size_t SumTree::find(double mass) const {
  std::size_t i = 1;
  while (i < base_) {
    const double left = nodes_[2 * i];
    if (mass < left || nodes_[2 * i + 1] <= 0.0) {
      i = 2 * i;
    } else {
      mass -= left;
      i = 2 * i + 1;
    }
  }
  return std::min(i - base_, capacity_ - 1);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, double alpha)
    : capacity_(capacity), alpha_(alpha), tree_(capacity) {
  if (alpha < 0.0) throw InvalidArgument("priority exponent must be >= 0");
  items_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  tree_.set(next_, std::pow(max_priority_, alpha_));
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

double ReplayBuffer::priority(std::size_t slot) const {
  return std::pow(tree_.get(slot), 1.0 / std::max(alpha_, 1e-300));
}

ReplaySample ReplayBuffer::sample(std::size_t batch, double beta, std::mt19937_64& rng) const {
  if (size_ == 0) throw ContractViolation("sampling from an empty replay buffer");
  ReplaySample out;
  out.slots.reserve(batch);
  out.weights.reserve(batch);
  const double total = tree_.total();
  // Stratified sampling: one draw per equal-mass segment.
  const double segment = total / static_cast<double>(batch);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double max_w = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    const double mass = std::min((static_cast<double>(i) + u(rng)) * segment, total * (1.0 - 1e-12));
    std::size_t slot = tree_.find(mass);
    if (slot >= size_) slot = size_ - 1;
    const double p = tree_.get(slot) / total;
    const double w = std::pow(static_cast<double>(size_) * std::max(p, 1e-300), -beta);
    out.slots.push_back(slot);
    out.weights.push_back(w);
    max_w = std::max(max_w, w);
  }
  for (auto& w : out.weights) w /= max_w;
  return out;
}

void ReplayBuffer::update_priorities(std::span<const std::size_t> slots,
                                     std::span<const double> td_errors) {
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double p = std::abs(td_errors[i]) + kPriorityEpsilon;
    max_priority_ = std::max(max_priority_, p);
    tree_.set(slots[i], std::pow(p, alpha_));
  }
}

}  // namespace ipp
