#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace addcoal {

/// Raised when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine fails to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Absolute tolerance on the total mass of a configuration.
inline constexpr double kMassTolerance = 1e-9;

/// A point of the ranked simplex: positive masses, non-increasing, summing to one.
///
/// Instances are only produced by rank() and friends, so every live object
/// satisfies the invariants.
class RankedMassVector {
 public:
  std::size_t size() const { return masses_.size(); }
  double operator[](std::size_t i) const { return masses_[i]; }
  std::span<const double> masses() const { return masses_; }
  auto begin() const { return masses_.begin(); }
  auto end() const { return masses_.end(); }
  double largest() const { return masses_.front(); }
  double sum() const;

  friend bool operator==(const RankedMassVector&, const RankedMassVector&) = default;

 private:
  explicit RankedMassVector(std::vector<double> masses) : masses_(std::move(masses)) {}

  friend RankedMassVector rank(std::vector<double> masses);
  friend RankedMassVector rank_normalized(std::vector<double> masses);

  std::vector<double> masses_;
};

/// Sorts `masses` non-increasingly after checking positivity and unit sum.
RankedMassVector rank(std::vector<double> masses);

/// Divides by the total before ranking. Used after long merge chains where
/// rounding drifts the total away from one.
RankedMassVector rank_normalized(std::vector<double> masses);

/// (1/n, ..., 1/n)
RankedMassVector monodisperse(std::size_t n);

std::string to_string(const RankedMassVector& v);

}  // namespace addcoal
