#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "addcoal/core.hpp"
#include "addcoal/rng.hpp"

namespace addcoal {

/// One run of the finite additive coalescent: the state chain X(gamma_k) and
/// the jump times gamma_1 < ... < gamma_{n-1}.
struct CoalescentTrajectory {
  std::vector<RankedMassVector> states;
  std::vector<double> jump_times;
};

/// Sum over pairs of x_i + x_j, which is (n-1) times the total mass.
double total_merge_rate(const RankedMassVector& state);

/// Picks {i, j} (0-based, i < j) with probability (x_i + x_j) / total rate:
/// I size-biased, J uniform among the remaining indices.
std::pair<std::size_t, std::size_t> sample_merge_pair(const RankedMassVector& state, RngStream& rng);

struct StepResult {
  RankedMassVector next;
  double holding_time;
};

StepResult step(const RankedMassVector& state, RngStream& rng);

CoalescentTrajectory simulate(const RankedMassVector& initial, RngStream& rng);

/// X(t) for a coalescent started at time 0 from `initial`.
RankedMassVector state_at(const RankedMassVector& initial, double t, RngStream& rng);

/// Elapsed time after which the monodisperse n-cluster coalescent, started at
/// -log(n)/2, reaches standard time t.
double standard_elapsed(std::size_t n, double t);

/// Index sampler proportional to non-negative weights. Uses a Fenwick tree
/// for large inputs and a linear scan otherwise.
class SizeBiasedSampler {
 public:
  static constexpr std::size_t kFenwickThreshold = 1000;

  explicit SizeBiasedSampler(std::vector<double> weights);

  double weight(std::size_t i) const { return weights_[i]; }
  double total() const { return total_; }
  void set(std::size_t i, double w);
  /// Index i with prefix(i) <= u < prefix(i+1), for u in [0, total).
  std::size_t find(double u) const;

 private:
  std::vector<double> weights_;
  std::vector<double> tree_;
  double total_ = 0.0;
  bool fenwick_ = false;
};

/// Event-by-event simulator. Clusters live in fixed slots; the ranked view is
/// only materialized on request, so each merge costs O(log n).
class AdditiveCoalescent {
 public:
  struct Merge {
    double time;
    double holding_time;
    double mass_a;
    double mass_b;
  };

  explicit AdditiveCoalescent(const RankedMassVector& initial);

  std::size_t cluster_count() const { return active_.size(); }
  double time() const { return time_; }
  double total_rate() const;

  /// Performs the next merge. Requires at least two clusters.
  Merge advance(RngStream& rng);

  /// Runs until time t; the state afterwards is X(t).
  void run_until(double t, RngStream& rng);

  RankedMassVector state() const;

  /// Picks a cluster with probability proportional to its mass.
  double sample_size_biased_mass(RngStream& rng) const;

 private:
  std::pair<std::size_t, std::size_t> pick_pair(RngStream& rng) const;
  void merge_slots(std::size_t a, std::size_t b);

  SizeBiasedSampler sampler_;
  std::vector<std::size_t> active_;    // slots holding a live cluster
  std::vector<std::size_t> position_;  // slot -> index in active_
  double time_ = 0.0;
};

}  // namespace addcoal
