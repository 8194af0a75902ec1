#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "addcoal/core.hpp"
#include "addcoal/levy.hpp"
#include "addcoal/rng.hpp"

namespace addcoal {

/// A cluster of the one-dimensional sticky particle system. The initial
/// particles it is made of are the consecutive range
/// [first_particle, first_particle + particle_count).
struct Cluster {
  std::uint64_t id;
  double position;
  double mass;
  double velocity;
  std::size_t first_particle;
  std::size_t particle_count;
};

/// Clusters ordered by position.
struct ClusterSystem {
  std::vector<Cluster> clusters;
  double time = 0.0;

  double total_mass() const;
  double total_momentum() const;
  /// (first_particle, particle_count) of every cluster, left to right.
  std::vector<std::pair<std::size_t, std::size_t>> blocks() const;
};

/// n particles of mass dr at (i + 1/2) dr carrying velocity xi((i + 1/2) dr),
/// preceded by `left_buffer` particles at rest on the negative half-line
/// (n of them unless given). Particle ids are 0, 1, ... from left to right.
ClusterSystem initial_system(const DiscretePath& path, std::size_t n, double dr,
                             std::optional<std::size_t> left_buffer = std::nullopt);

struct CollisionEvent {
  double time;
  std::uint64_t left_id;
  std::uint64_t right_id;
  std::uint64_t merged_id;
  double location;
  double merged_mass;
};

/// Collision history. Initial particles have ids 0..N-1; the cluster created
/// by event k has id N + k.
struct EventLog {
  std::vector<double> initial_masses;
  std::vector<CollisionEvent> events;
};

struct EvolveResult {
  EventLog log;
  ClusterSystem final_state;
};

/// Event-driven ballistic aggregation up to `horizon`. Requires a time-0
/// system whose ids are 0..N-1 (as produced by initial_system).
EvolveResult evolve(const ClusterSystem& system, double horizon);

/// Cluster decomposition at time t from the free-flight positions alone:
/// the mass-weighted isotonic regression of x_i + t v_i. Each output
/// cluster carries the id of its leftmost particle.
ClusterSystem variational_oracle(const ClusterSystem& system, double t);

/// Heaviest cluster with position in [a, b]; ties go to the leftmost.
std::uint64_t pick_cluster(const ClusterSystem& system, double a, double b);

/// Ranked masses, normalized by the picked cluster's mass, of the clusters
/// that by time t have aggregated into the picked one.
class MergerHistory {
 public:
  struct Merge {
    double time;
    std::size_t left;   // node index
    std::size_t right;  // node index
  };

  std::uint64_t picked() const { return picked_; }
  double observation_time() const { return observation_time_; }
  double picked_mass() const { return picked_mass_; }
  std::size_t leaf_count() const { return leaf_count_; }
  std::span<const Merge> merges() const { return merges_; }
  double node_mass(std::size_t node) const { return node_mass_[node]; }

  /// M(r): merges at times <= r have happened.
  RankedMassVector state_at(double r) const;
  std::size_t block_count_at(double r) const;

 private:
  friend MergerHistory merger_history(const EventLog& log, std::uint64_t picked, double t);

  std::uint64_t picked_ = 0;
  double observation_time_ = 0.0;
  double picked_mass_ = 0.0;
  std::size_t leaf_count_ = 0;
  // Leaves first (left to right), then one node per merge.
  std::vector<double> node_mass_;
  std::vector<Merge> merges_;
};

MergerHistory merger_history(const EventLog& log, std::uint64_t picked, double t);

/// r(s) = t (1 - t / (t + e^s)), increasing from 0 to t.
double history_time(double t, double s);

/// (s, M(r(s))) for each s.
std::vector<std::pair<double, RankedMassVector>> time_changed_chain(const MergerHistory& history,
                                                                    std::span<const double> s_values);

/// Next merge seen from a history state with a given number of blocks.
struct PairObservation {
  std::vector<double> masses;  // ranked, normalized
  std::size_t i;               // ranked indices of the merging blocks, i < j
  std::size_t j;
};

/// Replays the history forward in r and records, for every state with
/// min_blocks..max_blocks blocks, which ranked pair merges next. Ties in
/// block mass are ordered at random.
std::vector<PairObservation> next_merge_pairs(const MergerHistory& history, std::size_t min_blocks,
                                              std::size_t max_blocks, RngStream& tie_break);

/// CSV with header time,left_id,right_id,location,merged_mass.
void write_event_csv(std::ostream& os, const EventLog& log);

}  // namespace addcoal
