#include "addcoal/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace addcoal {

JumpBridge JumpBridge::from_locations(const RankedMassVector& masses, std::span<const double> locations) {
  if (locations.size() != masses.size()) throw InvalidArgument("bridge: one location per mass required");
  JumpBridge b;
  b.jumps_.reserve(masses.size());
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(locations[i] >= 0.0 && locations[i] < 1.0)) throw InvalidArgument("bridge: location outside [0, 1)");
    b.jumps_.push_back({locations[i], masses[i]});
  }
  std::vector<double> sorted(locations.begin(), locations.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("bridge: jump locations must be distinct");
  }
  b.total_ = masses.sum();
  return b;
}

double JumpBridge::operator()(double u) const {
  double value = 0.0;
  for (const auto& j : jumps_) value += j.size * ((u >= j.location ? 1.0 : 0.0) - u);
  return value;
}

double JumpExcursion::value(double u) const {
  if (u <= 0.0) return 0.0;
  const auto end = std::upper_bound(locations.begin(), locations.end(), u);
  const auto count = static_cast<std::size_t>(end - locations.begin());
  double jumps = 0.0;
  for (std::size_t i = 0; i < count; ++i) jumps += sizes[i];
  return jumps - total * std::min(u, 1.0);
}

double GridExcursion::value(double u) const {
  const auto m = static_cast<double>(steps());
  const double x = std::clamp(u, 0.0, 1.0) * m;
  const auto k = std::min(static_cast<std::size_t>(x), steps() - 1);
  const double frac = x - static_cast<double>(k);
  return values[k] + frac * (values[k + 1] - values[k]);
}

ExcursionPath::ExcursionPath(JumpExcursion path) : path_(std::move(path)) {
  const auto& p = std::get<JumpExcursion>(path_);
  if (p.locations.empty() || p.locations.size() != p.sizes.size()) {
    throw InvalidArgument("excursion: need matching non-empty jump lists");
  }
  if (p.locations.front() != 0.0) throw InvalidArgument("excursion: first jump must sit at 0");
}

ExcursionPath::ExcursionPath(GridExcursion path) : path_(std::move(path)) {
  if (std::get<GridExcursion>(path_).values.size() < 3) throw InvalidArgument("excursion: grid needs m >= 2");
}

const JumpExcursion& ExcursionPath::jump_path() const {
  if (!has_jumps()) throw InvalidArgument("excursion: not a jump path");
  return std::get<JumpExcursion>(path_);
}

const GridExcursion& ExcursionPath::grid_path() const {
  if (has_jumps()) throw InvalidArgument("excursion: not a grid path");
  return std::get<GridExcursion>(path_);
}

double ExcursionPath::operator()(double u) const {
  return std::visit([u](const auto& p) { return p.value(u); }, path_);
}

std::vector<RankedMassVector> FragmentationRecord::coalescent_chain() const {
  return {states.rbegin(), states.rend()};
}

JumpBridge build_bridge(const RankedMassVector& masses, RngStream& rng) {
  std::vector<double> locations(masses.size());
  for (;;) {
    for (auto& u : locations) u = rng.uniform();
    std::vector<double> sorted = locations;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) break;
  }
  return JumpBridge::from_locations(masses, locations);
}

ExcursionPath vervaat_transform(const JumpBridge& bridge) {
  std::vector<Jump> jumps(bridge.jumps().begin(), bridge.jumps().end());
  std::sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.location < b.location; });
  const double total = bridge.total_mass();

  // Between jumps the path decreases, so the infimum is a left limit b(U_i-).
  std::size_t argmin = 0;
  double best = 0.0;
  double before = 0.0;
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    const double left_limit = before - total * jumps[i].location;
    if (i == 0 || left_limit < best) {
      best = left_limit;
      argmin = i;
    }
    before += jumps[i].size;
  }

  JumpExcursion e;
  e.total = total;
  e.rotation = jumps[argmin].location;
  e.locations.reserve(jumps.size());
  e.sizes.reserve(jumps.size());
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const auto& j = jumps[(argmin + k) % jumps.size()];
    double loc = j.location - e.rotation;
    if (loc < 0.0) loc += 1.0;
    e.locations.push_back(k == 0 ? 0.0 : loc);
    e.sizes.push_back(j.size);
  }
  return ExcursionPath(std::move(e));
}

ExcursionPath vervaat_transform(std::span<const double> grid_bridge) {
  if (grid_bridge.size() < 3) throw InvalidArgument("vervaat_transform: grid needs m >= 2");
  const std::size_t m = grid_bridge.size() - 1;
  const auto argmin = static_cast<std::size_t>(
      std::min_element(grid_bridge.begin(), grid_bridge.begin() + static_cast<std::ptrdiff_t>(m)) -
      grid_bridge.begin());
  GridExcursion e;
  e.values.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j) e.values[j] = grid_bridge[(argmin + j) % m] - grid_bridge[argmin];
  e.values[0] = 0.0;
  e.values[m] = 0.0;
  return ExcursionPath(std::move(e));
}

namespace {

std::vector<Interval> jump_intervals(const JumpExcursion& p, double t) {
  // f(u) = t u - e(u) = (t + total) u - J(u) rises with slope t + total and
  // drops by x_i at each jump. A block closes where f climbs back to the level
  // it left; a new block opens at every jump whose left limit is a running max.
  const double slope = t + p.total;
  std::vector<Interval> out;
  double level = 0.0;
  double jumps_before = 0.0;
  double block_mass = 0.0;
  double block_begin = 0.0;
  for (std::size_t i = 0; i < p.jump_count(); ++i) {
    const double c = p.locations[i];
    const double f_left = slope * c - jumps_before;
    if (i > 0 && f_left >= level) {
      out.push_back({block_begin, c - (f_left - level) / slope, block_mass});
      level = f_left;
      block_begin = c;
      block_mass = 0.0;
    }
    block_mass += p.sizes[i];
    jumps_before += p.sizes[i];
  }
  const double f_end = slope - jumps_before;
  out.push_back({block_begin, std::min(1.0, 1.0 - (f_end - level) / slope), block_mass});
  return out;
}

std::vector<Interval> grid_intervals(const GridExcursion& p, double t) {
  // Ladder points of k -> t k/m - e_k split [0, 1]; each gap between
  // consecutive ladder points is one block of G(t).
  const std::size_t m = p.steps();
  const double inv_m = 1.0 / static_cast<double>(m);
  std::vector<Interval> out;
  double running = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    const double f = t * static_cast<double>(k) * inv_m - p.values[k];
    if (f >= running || k == m) {
      running = std::max(running, f);
      out.push_back({static_cast<double>(last) * inv_m, static_cast<double>(k) * inv_m,
                     static_cast<double>(k - last) * inv_m});
      last = k;
    }
  }
  return out;
}

}  // namespace

std::vector<Interval> t_intervals(const ExcursionPath& path, double t) {
  if (t < 0.0) throw InvalidArgument("t_intervals: t must be non-negative");
  if (path.has_jumps()) return jump_intervals(path.jump_path(), t);
  return grid_intervals(path.grid_path(), t);
}

RankedMassVector fragmentation_masses(const ExcursionPath& path, double t) {
  const auto intervals = t_intervals(path, t);
  std::vector<double> masses;
  masses.reserve(intervals.size());
  for (const auto& iv : intervals) masses.push_back(iv.mass);
  return rank_normalized(std::move(masses));
}

FragmentationRecord split_times(const ExcursionPath& path) {
  const auto& p = path.jump_path();
  const std::size_t n = p.jump_count();
  std::vector<double> prefix(n + 1, 0.0);
  std::partial_sum(p.sizes.begin(), p.sizes.end(), prefix.begin() + 1);

  // Jump i starts its own block once f(c_i-) >= f(c_j-) for every earlier j,
  // i.e. t >= max_j (J_i - J_j) / (c_i - c_j) - total. The j = 0 term also
  // enforces f(c_i-) >= 0.
  struct Split {
    double time;
    std::size_t jump;
  };
  std::vector<Split> splits;
  splits.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t i = 1; i < n; ++i) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < i; ++j) {
      worst = std::max(worst, (prefix[i] - prefix[j]) / (p.locations[i] - p.locations[j]));
    }
    splits.push_back({std::max(0.0, worst - p.total), i});
  }
  std::sort(splits.begin(), splits.end(),
            [](const Split& a, const Split& b) { return a.time != b.time ? a.time < b.time : a.jump < b.jump; });

  FragmentationRecord record;
  record.states.push_back(rank_normalized({p.total}));
  std::set<std::size_t> starts{0, n};
  for (std::size_t k = 0; k < splits.size(); ++k) {
    if (k > 0 && splits[k].time == splits[k - 1].time) record.simultaneous = true;
    record.split_times.push_back(splits[k].time);
    starts.insert(splits[k].jump);
    std::vector<double> blocks;
    blocks.reserve(starts.size() - 1);
    for (auto it = starts.begin(); std::next(it) != starts.end(); ++it) {
      blocks.push_back(prefix[*std::next(it)] - prefix[*it]);
    }
    record.states.push_back(rank_normalized(std::move(blocks)));
  }
  return record;
}

ExcursionPath brownian_excursion(std::size_t m, RngStream& rng) {
  if (m < 2) throw InvalidArgument("brownian_excursion: m must be at least 2");
  std::vector<double> steps(m);
  for (auto& z : steps) z = rng.normal();
  const double mean = std::accumulate(steps.begin(), steps.end(), 0.0) / static_cast<double>(m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<double> bridge(m + 1, 0.0);
  for (std::size_t k = 0; k < m; ++k) bridge[k + 1] = bridge[k] + (steps[k] - mean) * scale;
  bridge[m] = 0.0;
  return vervaat_transform(bridge);
}

RankedMassVector standard_coalescent_marginal(std::size_t m, double t, RngStream& rng) {
  return fragmentation_masses(brownian_excursion(m, rng), std::exp(-t));
}

}  // namespace addcoal
