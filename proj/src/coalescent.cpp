#include "addcoal/coalescent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace addcoal {

namespace {

void require_mergeable(std::size_t n) {
  if (n < 2) throw InvalidArgument("no merge possible: fewer than two clusters");
}

}  // namespace

double total_merge_rate(const RankedMassVector& state) {
  require_mergeable(state.size());
  return static_cast<double>(state.size() - 1) * state.sum();
}

std::pair<std::size_t, std::size_t> sample_merge_pair(const RankedMassVector& state, RngStream& rng) {
  const std::size_t n = state.size();
  require_mergeable(n);
  const double u = rng.uniform() * state.sum();
  std::size_t first = n - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += state[i];
    if (u < acc) {
      first = i;
      break;
    }
  }
  std::size_t second = rng.uniform_index(n - 1);
  if (second >= first) ++second;
  return std::minmax(first, second);
}

StepResult step(const RankedMassVector& state, RngStream& rng) {
  const double hold = rng.exponential(total_merge_rate(state));
  const auto [i, j] = sample_merge_pair(state, rng);
  std::vector<double> next;
  next.reserve(state.size() - 1);
  for (std::size_t k = 0; k < state.size(); ++k) {
    if (k != i && k != j) next.push_back(state[k]);
  }
  const double merged = state[i] + state[j];
  next.insert(std::lower_bound(next.begin(), next.end(), merged, std::greater<>()), merged);
  return {rank_normalized(std::move(next)), hold};
}

CoalescentTrajectory simulate(const RankedMassVector& initial, RngStream& rng) {
  CoalescentTrajectory traj;
  traj.states.reserve(initial.size());
  traj.jump_times.reserve(initial.size() - 1);
  traj.states.push_back(initial);
  AdditiveCoalescent run(initial);
  while (run.cluster_count() > 1) {
    const auto merge = run.advance(rng);
    traj.jump_times.push_back(merge.time);
    traj.states.push_back(run.state());
  }
  return traj;
}

RankedMassVector state_at(const RankedMassVector& initial, double t, RngStream& rng) {
  if (t < 0.0 || std::isnan(t)) throw InvalidArgument("state_at: negative time");
  AdditiveCoalescent run(initial);
  run.run_until(t, rng);
  return run.state();
}

double standard_elapsed(std::size_t n, double t) { return t + 0.5 * std::log(static_cast<double>(n)); }

SizeBiasedSampler::SizeBiasedSampler(std::vector<double> weights)
    : weights_(std::move(weights)), fenwick_(weights_.size() >= kFenwickThreshold) {
  total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (fenwick_) {
    // Linear-time Fenwick construction.
    tree_ = weights_;
    for (std::size_t i = 1; i <= tree_.size(); ++i) {
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= tree_.size()) tree_[parent - 1] += tree_[i - 1];
    }
  }
}

void SizeBiasedSampler::set(std::size_t i, double w) {
  const double delta = w - weights_[i];
  weights_[i] = w;
  total_ += delta;
  if (fenwick_) {
    for (std::size_t k = i + 1; k <= tree_.size(); k += k & (~k + 1)) tree_[k - 1] += delta;
  }
}

std::size_t SizeBiasedSampler::find(double u) const {
  const std::size_t n = weights_.size();
  std::size_t idx = n;
  if (fenwick_) {
    std::size_t pos = 0;
    std::size_t mask = std::size_t{1} << static_cast<unsigned>(std::bit_width(n) - 1);
    double rem = u;
    for (; mask != 0; mask >>= 1) {
      const std::size_t next = pos + mask;
      if (next <= n && tree_[next - 1] <= rem) {
        pos = next;
        rem -= tree_[next - 1];
      }
    }
    idx = pos;
  } else {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += weights_[i];
      if (u < acc) {
        idx = i;
        break;
      }
    }
  }
  // Rounding can land on an empty slot or past the end; step back to a live one.
  if (idx >= n) idx = n - 1;
  while (idx > 0 && weights_[idx] <= 0.0) --idx;
  while (idx < n && weights_[idx] <= 0.0) ++idx;
  return idx;
}

AdditiveCoalescent::AdditiveCoalescent(const RankedMassVector& initial)
    : sampler_(std::vector<double>(initial.begin(), initial.end())),
      active_(initial.size()),
      position_(initial.size()) {
  std::iota(active_.begin(), active_.end(), std::size_t{0});
  std::iota(position_.begin(), position_.end(), std::size_t{0});
}

double AdditiveCoalescent::total_rate() const {
  return static_cast<double>(active_.size() - 1) * sampler_.total();
}

std::pair<std::size_t, std::size_t> AdditiveCoalescent::pick_pair(RngStream& rng) const {
  const std::size_t a = sampler_.find(rng.uniform() * sampler_.total());
  std::size_t k = rng.uniform_index(active_.size() - 1);
  if (k >= position_[a]) ++k;
  return {a, active_[k]};
}

void AdditiveCoalescent::merge_slots(std::size_t a, std::size_t b) {
  sampler_.set(a, sampler_.weight(a) + sampler_.weight(b));
  sampler_.set(b, 0.0);
  // Swap-remove slot b from the active list.
  const std::size_t pos_b = position_[b];
  const std::size_t last = active_.back();
  active_[pos_b] = last;
  position_[last] = pos_b;
  active_.pop_back();
}

AdditiveCoalescent::Merge AdditiveCoalescent::advance(RngStream& rng) {
  require_mergeable(active_.size());
  const double hold = rng.exponential(total_rate());
  const auto [a, b] = pick_pair(rng);
  time_ += hold;
  const Merge merge{time_, hold, sampler_.weight(a), sampler_.weight(b)};
  merge_slots(a, b);
  return merge;
}

void AdditiveCoalescent::run_until(double t, RngStream& rng) {
  while (active_.size() > 1) {
    // The exponential clock is memoryless, so an overshooting draw can be dropped.
    const double hold = rng.exponential(total_rate());
    if (time_ + hold > t) break;
    const auto [a, b] = pick_pair(rng);
    time_ += hold;
    merge_slots(a, b);
  }
  time_ = std::max(time_, t);
}

RankedMassVector AdditiveCoalescent::state() const {
  std::vector<double> masses;
  masses.reserve(active_.size());
  for (std::size_t slot : active_) masses.push_back(sampler_.weight(slot));
  return rank_normalized(std::move(masses));
}

double AdditiveCoalescent::sample_size_biased_mass(RngStream& rng) const {
  return sampler_.weight(sampler_.find(rng.uniform() * sampler_.total())) / sampler_.total();
}

}  // namespace addcoal
