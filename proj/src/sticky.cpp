#include "addcoal/sticky.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <queue>
#include <string>
#include <unordered_map>

namespace addcoal {

double ClusterSystem::total_mass() const {
  double m = 0.0;
  for (const auto& c : clusters) m += c.mass;
  return m;
}

double ClusterSystem::total_momentum() const {
  double p = 0.0;
  for (const auto& c : clusters) p += c.mass * c.velocity;
  return p;
}

std::vector<std::pair<std::size_t, std::size_t>> ClusterSystem::blocks() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.emplace_back(c.first_particle, c.particle_count);
  return out;
}

ClusterSystem initial_system(const DiscretePath& path, std::size_t n, double dr,
                             std::optional<std::size_t> buffer) {
  const std::size_t left_buffer = buffer.value_or(n);
  if (n == 0 || !(dr > 0.0)) throw InvalidArgument("initial_system: need n > 0 and dr > 0");
  if (path.horizon() < static_cast<double>(n) * dr * (1.0 - 1e-12)) {
    throw InvalidArgument("initial_system: path covers " + std::to_string(path.horizon()) + " but " +
                          std::to_string(static_cast<double>(n) * dr) + " is required");
  }
  ClusterSystem sys;
  sys.clusters.reserve(left_buffer + n);
  std::uint64_t id = 0;
  for (std::size_t i = left_buffer; i > 0; --i) {
    sys.clusters.push_back({id, -(static_cast<double>(i) - 0.5) * dr, dr, 0.0, id, 1});
    ++id;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * dr;
    sys.clusters.push_back({id, x, dr, path.at(x), id, 1});
    ++id;
  }
  return sys;
}

namespace {

struct Pending {
  double time;
  double location;
  std::size_t left;
  std::size_t right;
  std::uint32_t left_gen;
  std::uint32_t right_gen;
};

// Earliest time first; simultaneous collisions resolve left to right.
struct Later {
  bool operator()(const Pending& a, const Pending& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.location != b.location) return a.location > b.location;
    return a.left > b.left;
  }
};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

}  // namespace

EvolveResult evolve(const ClusterSystem& system, double horizon) {
  if (horizon < system.time) throw InvalidArgument("evolve: horizon precedes the system time");
  const std::size_t n = system.clusters.size();
  EvolveResult result;
  result.log.initial_masses.assign(n, 0.0);
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = system.clusters[i];
    if (c.id >= n || seen[c.id]) throw InvalidArgument("evolve: cluster ids must be a permutation of 0..N-1");
    if (i > 0 && !(c.position > system.clusters[i - 1].position)) {
      throw InvalidArgument("evolve: positions must be strictly increasing");
    }
    seen[c.id] = true;
    result.log.initial_masses[c.id] = c.mass;
  }

  // Slot state: affine trajectory x_ref + v (t - t_ref).
  std::vector<double> x_ref(n), t_ref(n, system.time), vel(n), mass(n);
  std::vector<std::uint64_t> ids(n);
  std::vector<std::size_t> first(n), count(n), prev(n), next(n);
  std::vector<std::uint32_t> gen(n, 0);
  std::vector<char> alive(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = system.clusters[i];
    x_ref[i] = c.position;
    vel[i] = c.velocity;
    mass[i] = c.mass;
    ids[i] = c.id;
    first[i] = c.first_particle;
    count[i] = c.particle_count;
    prev[i] = i == 0 ? kNone : i - 1;
    next[i] = i + 1 == n ? kNone : i + 1;
  }
  auto position = [&](std::size_t s, double t) { return x_ref[s] + vel[s] * (t - t_ref[s]); };

  std::priority_queue<Pending, std::vector<Pending>, Later> queue;
  double now = system.time;
  auto schedule = [&](std::size_t a, std::size_t b) {
    if (a == kNone || b == kNone || !(vel[a] > vel[b])) return;
    const double t = std::max(now, ((x_ref[b] - vel[b] * t_ref[b]) - (x_ref[a] - vel[a] * t_ref[a])) / (vel[a] - vel[b]));
    if (t > horizon) return;
    queue.push({t, position(a, t), a, b, gen[a], gen[b]});
  };
  for (std::size_t i = 0; i + 1 < n; ++i) schedule(i, i + 1);

  while (!queue.empty()) {
    const Pending ev = queue.top();
    queue.pop();
    if (!alive[ev.left] || !alive[ev.right] || gen[ev.left] != ev.left_gen || gen[ev.right] != ev.right_gen ||
        next[ev.left] != ev.right) {
      continue;
    }
    now = ev.time;
    const std::size_t a = ev.left;
    const std::size_t b = ev.right;
    const double m = mass[a] + mass[b];
    const double location = (mass[a] * position(a, now) + mass[b] * position(b, now)) / m;
    const std::uint64_t merged_id = n + result.log.events.size();
    result.log.events.push_back({now, ids[a], ids[b], merged_id, location, m});

    vel[a] = (mass[a] * vel[a] + mass[b] * vel[b]) / m;
    mass[a] = m;
    x_ref[a] = location;
    t_ref[a] = now;
    ids[a] = merged_id;
    count[a] += count[b];
    ++gen[a];
    alive[b] = 0;
    next[a] = next[b];
    if (next[b] != kNone) prev[next[b]] = a;

    schedule(prev[a], a);
    schedule(a, next[a]);
  }

  auto& final_state = result.final_state;
  final_state.time = horizon;
  for (std::size_t s = 0; s != kNone && s < n; s = next[s]) {
    if (!alive[s]) continue;
    final_state.clusters.push_back({ids[s], position(s, horizon), mass[s], vel[s], first[s], count[s]});
  }
  return result;
}

ClusterSystem variational_oracle(const ClusterSystem& system, double t) {
  if (t < 0.0) throw InvalidArgument("variational_oracle: t must be non-negative");
  struct Block {
    double mass;
    double moment;    // sum m (x + t v)
    double momentum;  // sum m v
    std::size_t first;
    std::size_t count;
    std::uint64_t id;
    double mean() const { return moment / mass; }
  };
  std::vector<Block> stack;
  stack.reserve(system.clusters.size());
  for (const auto& c : system.clusters) {
    const double y = c.position + t * c.velocity;
    stack.push_back({c.mass, c.mass * y, c.mass * c.velocity, c.first_particle, c.particle_count, c.id});
    // Pool adjacent violators: a block may not sit at or right of its successor.
    while (stack.size() > 1 && stack[stack.size() - 2].mean() >= stack.back().mean()) {
      Block top = stack.back();
      stack.pop_back();
      auto& under = stack.back();
      under.mass += top.mass;
      under.moment += top.moment;
      under.momentum += top.momentum;
      under.count += top.count;
    }
  }
  ClusterSystem out;
  out.time = system.time + t;
  out.clusters.reserve(stack.size());
  for (const auto& b : stack) {
    out.clusters.push_back({b.id, b.mean(), b.mass, b.momentum / b.mass, b.first, b.count});
  }
  return out;
}

std::uint64_t pick_cluster(const ClusterSystem& system, double a, double b) {
  const Cluster* best = nullptr;
  for (const auto& c : system.clusters) {
    if (c.position < a || c.position > b) continue;
    if (best == nullptr || c.mass > best->mass) best = &c;
  }
  if (best == nullptr) throw InvalidArgument("pick_cluster: no cluster in window");
  return best->id;
}

MergerHistory merger_history(const EventLog& log, std::uint64_t picked, double t) {
  const std::uint64_t leaves = log.initial_masses.size();
  if (picked >= leaves + log.events.size()) {
    throw InvalidArgument("merger_history: unknown cluster id " + std::to_string(picked));
  }
  if (picked >= leaves && log.events[picked - leaves].time > t) {
    throw InvalidArgument("merger_history: cluster does not exist at time t");
  }

  // Collect the subtree rooted at `picked`.
  std::vector<std::uint64_t> leaf_ids;
  std::vector<std::size_t> event_ids;
  std::vector<std::uint64_t> stack{picked};
  while (!stack.empty()) {
    const std::uint64_t id = stack.back();
    stack.pop_back();
    if (id < leaves) {
      leaf_ids.push_back(id);
    } else {
      const auto& ev = log.events[id - leaves];
      event_ids.push_back(id - leaves);
      stack.push_back(ev.left_id);
      stack.push_back(ev.right_id);
    }
  }
  std::sort(leaf_ids.begin(), leaf_ids.end());
  std::sort(event_ids.begin(), event_ids.end());

  MergerHistory h;
  h.picked_ = picked;
  h.observation_time_ = t;
  h.leaf_count_ = leaf_ids.size();
  std::unordered_map<std::uint64_t, std::size_t> node_of;
  node_of.reserve(leaf_ids.size() + event_ids.size());
  for (std::uint64_t id : leaf_ids) {
    node_of[id] = h.node_mass_.size();
    h.node_mass_.push_back(log.initial_masses[id]);
  }
  for (std::size_t e : event_ids) {
    const auto& ev = log.events[e];
    const std::size_t l = node_of.at(ev.left_id);
    const std::size_t r = node_of.at(ev.right_id);
    node_of[ev.merged_id] = h.node_mass_.size();
    h.node_mass_.push_back(h.node_mass_[l] + h.node_mass_[r]);
    h.merges_.push_back({ev.time, l, r});
  }
  h.picked_mass_ = h.node_mass_.back();
  for (double& m : h.node_mass_) m /= h.picked_mass_;
  return h;
}

std::size_t MergerHistory::block_count_at(double r) const {
  std::size_t merged = 0;
  for (const auto& m : merges_) merged += m.time <= r ? 1 : 0;
  return leaf_count_ - merged;
}

RankedMassVector MergerHistory::state_at(double r) const {
  // A node is alive at r if it exists by r and its parent forms after r.
  std::vector<char> alive(node_mass_.size(), 0);
  std::fill(alive.begin(), alive.begin() + static_cast<std::ptrdiff_t>(leaf_count_), 1);
  for (std::size_t k = 0; k < merges_.size(); ++k) {
    if (merges_[k].time > r) continue;
    alive[merges_[k].left] = 0;
    alive[merges_[k].right] = 0;
    alive[leaf_count_ + k] = 1;
  }
  std::vector<double> masses;
  for (std::size_t i = 0; i < alive.size(); ++i) {
    if (alive[i]) masses.push_back(node_mass_[i]);
  }
  return rank_normalized(std::move(masses));
}

double history_time(double t, double s) {
  // t e^s / (t + e^s), written to stay finite for large |s|.
  return t / (1.0 + t * std::exp(-s));
}

std::vector<std::pair<double, RankedMassVector>> time_changed_chain(const MergerHistory& history,
                                                                    std::span<const double> s_values) {
  std::vector<std::pair<double, RankedMassVector>> out;
  out.reserve(s_values.size());
  for (double s : s_values) out.emplace_back(s, history.state_at(history_time(history.observation_time(), s)));
  return out;
}

std::vector<PairObservation> next_merge_pairs(const MergerHistory& history, std::size_t min_blocks,
                                              std::size_t max_blocks, RngStream& tie_break) {
  std::vector<PairObservation> out;
  const auto merges = history.merges();
  const std::size_t leaves = history.leaf_count();
  // Skip ahead to the first state with at most max_blocks blocks.
  const std::size_t start = leaves > max_blocks ? leaves - max_blocks : 0;
  if (start > merges.size()) return out;
  std::vector<char> alive(leaves + merges.size(), 0);
  std::fill(alive.begin(), alive.begin() + static_cast<std::ptrdiff_t>(leaves), 1);
  for (std::size_t k = 0; k < start; ++k) {
    alive[merges[k].left] = 0;
    alive[merges[k].right] = 0;
    alive[leaves + k] = 1;
  }
  std::vector<std::size_t> live;
  for (std::size_t v = 0; v < leaves + start; ++v) {
    if (alive[v]) live.push_back(v);
  }

  for (std::size_t k = start; k < merges.size(); ++k) {
    const std::size_t blocks = live.size();
    if (blocks >= min_blocks && blocks <= max_blocks) {
      std::vector<std::size_t> order = live;
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[tie_break.uniform_index(i)]);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return history.node_mass(a) > history.node_mass(b);
      });
      PairObservation obs;
      obs.masses.reserve(order.size());
      std::size_t ra = 0;
      std::size_t rb = 0;
      for (std::size_t i = 0; i < order.size(); ++i) {
        obs.masses.push_back(history.node_mass(order[i]));
        if (order[i] == merges[k].left) ra = i;
        if (order[i] == merges[k].right) rb = i;
      }
      obs.i = std::min(ra, rb);
      obs.j = std::max(ra, rb);
      out.push_back(std::move(obs));
    }
    std::erase_if(live, [&](std::size_t v) { return v == merges[k].left || v == merges[k].right; });
    live.push_back(leaves + k);
  }
  return out;
}

void write_event_csv(std::ostream& os, const EventLog& log) {
  os << "time,left_id,right_id,location,merged_mass\n";
  char buf[128];
  for (const auto& e : log.events) {
    std::snprintf(buf, sizeof buf, "%.17g,%llu,%llu,%.17g,%.17g\n", e.time, static_cast<unsigned long long>(e.left_id),
                  static_cast<unsigned long long>(e.right_id), e.location, e.merged_mass);
    os << buf;
  }
}

}  // namespace addcoal
