#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace addcoal {

/// Reproducible random stream identified by (master_seed, stream_index).
///
/// The engine seed is a SplitMix64 hash of the pair, so replicate r can be
/// simulated from RngStream(seed, r) in any order with identical results.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// Child stream keyed by `index`; independent of this stream's draws so far.
  RngStream split(std::uint64_t index) const;

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Uniform integer on {0, ..., n-1}; n > 0.
  std::size_t uniform_index(std::size_t n);
  double exponential(double rate);
  double normal();
  std::uint64_t poisson(double mean);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Stream index for replicate `replicate` of experiment `tag`.
constexpr std::uint64_t stream_id(std::uint32_t tag, std::uint32_t replicate) {
  return (static_cast<std::uint64_t>(tag) << 32) | replicate;
}

}  // namespace addcoal
