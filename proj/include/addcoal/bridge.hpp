#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "addcoal/core.hpp"
#include "addcoal/rng.hpp"

namespace addcoal {

struct Jump {
  double location;
  double size;
};

/// b(u) = sum_i x_i (1{u >= U_i} - u) on [0, 1].
class JumpBridge {
 public:
  /// Jumps of sizes `masses` at the given distinct locations in [0, 1).
  static JumpBridge from_locations(const RankedMassVector& masses, std::span<const double> locations);

  std::span<const Jump> jumps() const { return jumps_; }
  double total_mass() const { return total_; }
  double drift_slope() const { return -total_; }
  double operator()(double u) const;

 private:
  std::vector<Jump> jumps_;
  double total_ = 0.0;
};

/// Excursion made of positive jumps and a linear drift of slope -total.
/// Jumps are sorted by location and the first one sits at 0.
struct JumpExcursion {
  std::vector<double> locations;
  std::vector<double> sizes;
  double total = 1.0;
  // Location of the bridge infimum the path was rotated at.
  double rotation = 0.0;

  std::size_t jump_count() const { return sizes.size(); }
  /// Right-continuous for u > 0; the path starts from 0 at u = 0.
  double value(double u) const;
};

/// Excursion sampled on the uniform grid k/m, k = 0..m.
struct GridExcursion {
  std::vector<double> values;

  std::size_t steps() const { return values.size() - 1; }
  /// Linear interpolation between grid points.
  double value(double u) const;
};

/// Either representation of a non-negative excursion on [0, 1].
class ExcursionPath {
 public:
  explicit ExcursionPath(JumpExcursion path);
  explicit ExcursionPath(GridExcursion path);

  bool has_jumps() const { return std::holds_alternative<JumpExcursion>(path_); }
  const JumpExcursion& jump_path() const;
  const GridExcursion& grid_path() const;
  double operator()(double u) const;

 private:
  std::variant<JumpExcursion, GridExcursion> path_;
};

/// Half-open interval [begin, end) carrying the jump mass (or length) of a block.
struct Interval {
  double begin;
  double end;
  double mass;
};

struct FragmentationRecord {
  std::vector<double> split_times;
  // states[k] is F(t) for split_times[k-1] <= t < split_times[k]; states[0] = (1).
  std::vector<RankedMassVector> states;
  // Two split times coincided; they were applied in increasing position order.
  bool simultaneous = false;

  /// States in reverse order: finest first, (1) last.
  std::vector<RankedMassVector> coalescent_chain() const;
};

JumpBridge build_bridge(const RankedMassVector& masses, RngStream& rng);

/// Rotation of the bridge at the location of its infimum.
ExcursionPath vervaat_transform(const JumpBridge& bridge);

/// Discrete rotation of a bridge path b_0 = b_m = 0 at its argmin.
ExcursionPath vervaat_transform(std::span<const double> grid_bridge);

/// Maximal intervals on which t u - e(u) stays strictly below the running
/// maximum of its positive part. A block splits at the instant a jump becomes
/// a new running-max point, so split instants belong to the finer state.
std::vector<Interval> t_intervals(const ExcursionPath& path, double t);

/// Ranked block masses at parameter t: jump sums per t-interval for a jump
/// path, interval lengths for a grid path.
RankedMassVector fragmentation_masses(const ExcursionPath& path, double t);

/// Exact split times of t -> F(t) for a jump path.
FragmentationRecord split_times(const ExcursionPath& path);

/// Normalized Brownian excursion approximated on an m-step grid.
ExcursionPath brownian_excursion(std::size_t m, RngStream& rng);

/// One draw of the standard additive coalescent at time t, up to grid error.
RankedMassVector standard_coalescent_marginal(std::size_t m, double t, RngStream& rng);

}  // namespace addcoal
