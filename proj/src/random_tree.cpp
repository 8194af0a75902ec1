#include "addcoal/random_tree.hpp"

#include <algorithm>
#include <string>

#include "addcoal/union_find.hpp"

namespace addcoal {

bool LabelledTree::is_spanning_tree() const {
  if (n == 0 || edges.size() + 1 != n) return false;
  UnionFind uf(n);
  for (const auto& [a, b] : edges) {
    if (a < 1 || b < 1 || a > n || b > n) return false;
    if (uf.unite(a - 1, b - 1) == n) return false;
  }
  return true;
}

LabelledTree LabelledTree::canonical() const {
  LabelledTree t = *this;
  for (auto& e : t.edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(t.edges.begin(), t.edges.end());
  return t;
}

LabelledTree prufer_decode(std::span<const std::uint32_t> sequence) {
  const std::size_t n = sequence.size() + 2;
  std::vector<std::size_t> degree(n + 1, 1);
  for (std::uint32_t label : sequence) {
    if (label < 1 || label > n) {
      throw InvalidArgument("prufer_decode: label " + std::to_string(label) + " outside 1.." + std::to_string(n));
    }
    ++degree[label];
  }

  LabelledTree tree;
  tree.n = n;
  tree.edges.reserve(n - 1);
  auto add_edge = [&](std::size_t a, std::size_t b) {
    tree.edges.emplace_back(static_cast<std::uint32_t>(std::min(a, b)), static_cast<std::uint32_t>(std::max(a, b)));
  };

  // Linear-time decoding: `ptr` scans for the smallest leaf; a freshly created
  // leaf smaller than ptr is consumed immediately.
  std::size_t ptr = 1;
  while (degree[ptr] != 1) ++ptr;
  std::size_t leaf = ptr;
  for (std::uint32_t v : sequence) {
    add_edge(leaf, v);
    if (--degree[v] == 1 && v < ptr) {
      leaf = v;
    } else {
      ++ptr;
      while (degree[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  add_edge(leaf, n);
  return tree;
}

LabelledTree sample_uniform_tree(std::size_t n, RngStream& rng) {
  if (n == 0) throw InvalidArgument("sample_uniform_tree: n must be at least 1");
  if (n == 1) return LabelledTree{};
  std::vector<std::uint32_t> seq(n - 2);
  for (auto& label : seq) label = static_cast<std::uint32_t>(rng.uniform_index(n) + 1);
  return prufer_decode(seq);
}

ForestChain forest_chain(const LabelledTree& tree, RngStream& rng) {
  const std::size_t n = tree.n;
  ForestChain chain;
  chain.opening_order = tree.edges;
  // Fisher-Yates.
  for (std::size_t i = chain.opening_order.size(); i > 1; --i) {
    std::swap(chain.opening_order[i - 1], chain.opening_order[rng.uniform_index(i)]);
  }

  // Histogram of component sizes; states are read off in descending size order.
  std::vector<std::size_t> count(n + 1, 0);
  count[1] = n;
  auto snapshot = [&] {
    std::vector<double> masses;
    for (std::size_t s = n; s >= 1; --s) {
      for (std::size_t c = 0; c < count[s]; ++c) masses.push_back(static_cast<double>(s) / static_cast<double>(n));
    }
    return rank_normalized(std::move(masses));
  };

  chain.states.reserve(n);
  chain.states.push_back(snapshot());
  UnionFind uf(n);
  for (const auto& [a, b] : chain.opening_order) {
    const std::size_t sa = uf.size_of(a - 1);
    const std::size_t sb = uf.size_of(b - 1);
    if (uf.unite(a - 1, b - 1) == n) throw InvalidArgument("forest_chain: input is not a tree");
    --count[sa];
    --count[sb];
    ++count[sa + sb];
    chain.states.push_back(snapshot());
  }
  return chain;
}

}  // namespace addcoal
