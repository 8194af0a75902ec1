#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "addcoal/rng.hpp"

namespace addcoal {

/// Negative jump of magnitude `size` occurring at rate `rate`.
struct LevyAtom {
  double size;
  double rate;
};

/// Absolutely continuous part of the Levy measure, integrated cell by cell
/// over `grid` (sorted, positive).
struct LevyDensity {
  std::function<double(double)> density;
  std::vector<double> grid;
};

/// Gaussian coefficient plus Levy measure of a process with no positive jumps.
class LevySpec {
 public:
  explicit LevySpec(double sigma2, std::vector<LevyAtom> atoms = {}, std::optional<LevyDensity> density = {});

  static LevySpec brownian(double sigma2 = 1.0) { return LevySpec(sigma2); }

  double sigma2() const { return sigma2_; }
  const std::vector<LevyAtom>& atoms() const { return atoms_; }
  const std::optional<LevyDensity>& density() const { return density_; }

  /// Whether sigma2 > 0 or the measure has infinite first moment. Only
  /// conforming specs yield eternal solutions; a finite measure never has an
  /// infinite first moment, so this reduces to sigma2 > 0.
  bool conforming() const { return sigma2_ > 0.0; }
  bool is_brownian() const { return atoms_.empty() && !density_; }

  /// Atoms plus the density part discretized at cell midpoints.
  std::vector<LevyAtom> discretized_atoms() const;

 private:
  double sigma2_;
  std::vector<LevyAtom> atoms_;
  std::optional<LevyDensity> density_;
};

/// Psi(q) = sigma2 q^2 / 2 + int (e^{-qx} - 1 + qx) Lambda(dx).
double psi(const LevySpec& spec, double q);

/// Psi'(q) = sigma2 q + int x (1 - e^{-qx}) Lambda(dx).
double psi_derivative(const LevySpec& spec, double q);

/// Phi(q, s): the root r >= 0 of Psi(s r) + r = q.
double phi(const LevySpec& spec, double q, double s);

/// Samples xi_0 = 0, xi_h, ..., xi_{(N-1)h}; entry k covers [kh, (k+1)h).
struct DiscretePath {
  double step = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double horizon() const { return step * static_cast<double>(values.size()); }
  /// Linear interpolation, clamped to the sampled range.
  double at(double r) const;
};

DiscretePath simulate_path(const LevySpec& spec, double horizon, double h, RngStream& rng);

/// Indices k where s xi_k + k h strictly exceeds every earlier value.
std::vector<std::size_t> record_set(const DiscretePath& path, double s);

/// record_set(path, s) is a subset of record_set(path, s_prime); requires 0 < s_prime < s.
bool check_nesting(const DiscretePath& path, double s, double s_prime);

/// Maximal runs of non-record indices [first, last].
struct IndexRun {
  std::size_t first;
  std::size_t last;
};

std::vector<IndexRun> record_gaps(const DiscretePath& path, double s);

/// For each s, the ranked lengths of the complement of the record set.
std::vector<std::vector<double>> interval_aggregation(const DiscretePath& path, std::span<const double> s_values);

}  // namespace addcoal
