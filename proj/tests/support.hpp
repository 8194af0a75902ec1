#pragma once

#include <cstddef>
#include <vector>

#include "addcoal/core.hpp"
#include "addcoal/rng.hpp"

namespace addcoal::test_support {

// Random ranked mass vector with 1..max_size entries; mixes exponential,
// uniform and heavy-tailed raw weights so that near-ties and dust both occur.
inline RankedMassVector random_masses(RngStream& rng, std::size_t max_size) {
  const std::size_t n = 1 + rng.uniform_index(max_size);
  std::vector<double> w(n);
  const auto kind = rng.uniform_index(3);
  for (auto& x : w) {
    if (kind == 0) {
      x = rng.exponential(1.0);
    } else if (kind == 1) {
      x = 0.5 + rng.uniform();
    } else {
      x = 1.0 / (rng.uniform_open() * rng.uniform_open());
    }
  }
  return rank_normalized(std::move(w));
}

inline std::vector<double> exponential_samples(RngStream& rng, std::size_t n, double rate) {
  std::vector<double> out(n);
  for (auto& x : out) x = rng.exponential(rate);
  return out;
}

}  // namespace addcoal::test_support
