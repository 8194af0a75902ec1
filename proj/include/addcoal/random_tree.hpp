#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "addcoal/core.hpp"
#include "addcoal/rng.hpp"

namespace addcoal {

/// Tree on vertices {1, ..., n}. Each edge is stored as (smaller, larger).
struct LabelledTree {
  using Edge = std::pair<std::uint32_t, std::uint32_t>;

  std::size_t n = 1;
  std::vector<Edge> edges;

  /// n-1 edges, labels in range, connected and acyclic.
  bool is_spanning_tree() const;
  /// Edges sorted lexicographically; equal trees compare equal.
  LabelledTree canonical() const;

  friend bool operator==(const LabelledTree&, const LabelledTree&) = default;
};

/// Ranked subtree sizes (divided by n) as edges are opened one by one.
struct ForestChain {
  std::vector<RankedMassVector> states;
  std::vector<LabelledTree::Edge> opening_order;
};

/// Decodes a Pruefer sequence of length n-2 with labels in {1, ..., n}.
LabelledTree prufer_decode(std::span<const std::uint32_t> sequence);

/// Uniform over the n^(n-2) labelled trees, via a uniform Pruefer sequence.
LabelledTree sample_uniform_tree(std::size_t n, RngStream& rng);

/// Opens the edges of `tree` in uniformly random order.
ForestChain forest_chain(const LabelledTree& tree, RngStream& rng);

}  // namespace addcoal
