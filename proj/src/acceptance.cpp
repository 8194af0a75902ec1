#include "addcoal/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <ostream>
#include <numeric>
#include <set>
#include <thread>
#include <tuple>

#include "addcoal/bridge.hpp"
#include "addcoal/coalescent.hpp"
#include "addcoal/core.hpp"
#include "addcoal/levy.hpp"
#include "addcoal/parallel.hpp"
#include "addcoal/random_tree.hpp"
#include "addcoal/rng.hpp"
#include "addcoal/smoluchowski.hpp"
#include "addcoal/stats.hpp"
#include "addcoal/sticky.hpp"

namespace addcoal {

namespace {

std::string printf_string(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

using Key = std::vector<long long>;

Key partition_key(const RankedMassVector& v, double scale) {
  Key k;
  k.reserve(v.size());
  for (double m : v) k.push_back(std::llround(m * scale));
  return k;
}

RngStream criterion_stream(std::uint64_t seed, int id) { return RngStream(seed, stream_id(static_cast<std::uint32_t>(id), 0)); }

// 1. First-step pair frequencies from (0.5, 0.3, 0.2).
CriterionResult pair_selection(std::uint64_t seed) {
  CriterionResult r;
  RngStream rng = criterion_stream(seed, 1);
  const auto state = rank({0.5, 0.3, 0.2});
  constexpr std::size_t kSteps = 100000;
  std::array<double, 3> counts{};
  for (std::size_t s = 0; s < kSteps; ++s) {
    const auto [i, j] = sample_merge_pair(state, rng);
    counts[i + j - 1] += 1.0;  // (0,1) -> 0, (0,2) -> 1, (1,2) -> 2
  }
  const std::array<double, 3> expected{0.40, 0.35, 0.25};
  const auto t = chi_square_test(counts, expected);
  r.statistical_pass = t.p_value > 1e-3;
  r.detail = printf_string("freq=(%.4f,%.4f,%.4f) chi2=%.3f p=%.4g", counts[0] / kSteps, counts[1] / kSteps,
                           counts[2] / kSteps, t.statistic, t.p_value);
  return r;
}

std::vector<CoalescentTrajectory> monodisperse_trajectories(std::size_t n, std::size_t count, RngStream& rng) {
  std::vector<CoalescentTrajectory> out(count);
  const auto initial = monodisperse(n);
  parallel_for(count, [&](std::size_t i) {
    RngStream s = rng.split(i);
    out[i] = simulate(initial, s);
  });
  return out;
}

std::vector<double> increments(const CoalescentTrajectory& tr) {
  std::vector<double> out(tr.jump_times.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = tr.jump_times[k] - (k ? tr.jump_times[k - 1] : 0.0);
  return out;
}

// 2. Holding times of the monodisperse n = 10 chain are Exp(9 - k).
CriterionResult jump_time_law(std::uint64_t seed) {
  CriterionResult r;
  RngStream rng = criterion_stream(seed, 2);
  constexpr std::size_t kN = 10;
  constexpr std::size_t kTrajectories = 10000;
  const auto trs = monodisperse_trajectories(kN, kTrajectories, rng);
  const double alpha = 1e-3 / static_cast<double>(kN - 1);
  bool pass = true;
  double min_p = 1.0;
  double max_d = 0.0;
  for (std::size_t k = 0; k + 1 < kN; ++k) {
    std::vector<double> samples(kTrajectories);
    for (std::size_t i = 0; i < kTrajectories; ++i) samples[i] = increments(trs[i])[k];
    const double rate = static_cast<double>(kN - 1 - k);
    const auto t = ks_test(samples, [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); }, alpha);
    pass = pass && t.pass;
    min_p = std::min(min_p, t.p_value);
    max_d = std::max(max_d, t.statistic);
  }
  r.statistical_pass = pass;
  r.detail = printf_string("9 KS tests, max D=%.4f min p=%.4g (Bonferroni alpha=%.3g)", max_d, min_p, alpha);
  return r;
}

// 3. Holding times are uncorrelated with the largest mass after each merge.
CriterionResult jump_state_independence(std::uint64_t seed) {
  CriterionResult r;
  RngStream rng = criterion_stream(seed, 3);
  constexpr std::size_t kN = 10;
  constexpr std::size_t kTrajectories = 10000;
  const auto trs = monodisperse_trajectories(kN, kTrajectories, rng);
  const double bound = 4.0 / std::sqrt(static_cast<double>(kTrajectories));
  double worst = 0.0;
  std::size_t tested = 0;
  for (std::size_t k = 0; k + 1 < kN; ++k) {
    std::vector<double> inc(kTrajectories);
    std::vector<double> largest(kTrajectories);
    for (std::size_t i = 0; i < kTrajectories; ++i) {
      inc[i] = increments(trs[i])[k];
      largest[i] = trs[i].states[k + 1].largest();
    }
    // After the first and the last merge the largest mass is deterministic.
    if (std::all_of(largest.begin(), largest.end(), [&](double x) { return x == largest.front(); })) continue;
    ++tested;
    worst = std::max(worst, std::abs(pearson_correlation(inc, largest)));
  }
  r.statistical_pass = worst <= bound;
  r.detail = printf_string("max |corr|=%.4f over %zu non-degenerate merges (bound %.3f)", worst, tested, bound);
  return r;
}

// 4. Uniform-tree edge deletion reversed gives the same chain as direct simulation.
CriterionResult tree_vs_direct(std::uint64_t seed) {
  CriterionResult r;
  RngStream rng = criterion_stream(seed, 4);
  constexpr std::size_t kN = 6;
  constexpr std::size_t kReplicates = 10000;
  RngStream direct_rng = rng.split(0);
  RngStream tree_rng = rng.split(1);
  const auto direct = monodisperse_trajectories(kN, kReplicates, direct_rng);
  std::vector<ForestChain> forests(kReplicates);
  parallel_for(kReplicates, [&](std::size_t i) {
    RngStream s = tree_rng.split(i);
    forests[i] = forest_chain(sample_uniform_tree(kN, s), s);
  });
  bool pass = true;
  double min_p = 1.0;
  for (std::size_t k = 1; k < kN; ++k) {
    PairedCounts<Key> counts;
    for (std::size_t i = 0; i < kReplicates; ++i) {
      counts.add(0, partition_key(direct[i].states[k], kN));
      counts.add(1, partition_key(forests[i].states[k], kN));
    }
    const auto t = counts.test();
    pass = pass && t.p_value > 1e-3;
    min_p = std::min(min_p, t.p_value);
  }
  r.statistical_pass = pass;
  r.detail = printf_string("5 two-sample chi-square tests, min p=%.4g", min_p);
  return r;
}

// 5. Reversed fragmentation of the bridge excursion gives the same chain as direct simulation.
CriterionResult bridge_vs_direct(std::uint64_t seed) {
  CriterionResult r;
  RngStream rng = criterion_stream(seed, 5);
  constexpr std::size_t kReplicates = 10000;
  const auto initial = rank({0.4, 0.3, 0.2, 0.1});
  RngStream direct_rng = rng.split(0);
  RngStream bridge_rng = rng.split(1);
  std::vector<CoalescentTrajectory> direct(kReplicates);
  std::vector<std::vector<RankedMassVector>> bridged(kReplicates);
  parallel_for(kReplicates, [&](std::size_t i) {
    RngStream a = direct_rng.split(i);
    direct[i] = simulate(initial, a);
    RngStream b = bridge_rng.split(i);
    bridged[i] = split_times(vervaat_transform(build_bridge(initial, b))).coalescent_chain();
  });
  bool pass = true;
  double min_p = 1.0;
  for (std::size_t k = 0; k < initial.size(); ++k) {
    PairedCounts<Key> counts;
    for (std::size_t i = 0; i < kReplicates; ++i) {
      counts.add(0, partition_key(direct[i].states[k], 10.0));
      counts.add(1, partition_key(bridged[i][k], 10.0));
    }
    const auto t = counts.test();
    pass = pass && t.p_value > 1e-3;
    min_p = std::min(min_p, t.p_value);
  }
  r.statistical_pass = pass;
  r.detail = printf_string("4 two-sample chi-square tests, min p=%.4g", min_p);
  return r;
}

// True when every coarse block start is a fine block start and every fine
// interval sits inside the coarse interval that contains its left end.
bool refines(const std::vector<Interval>& fine, const std::vector<Interval>& coarse) {
  std::set<double> fine_begins;
  for (const auto& iv : fine) fine_begins.insert(iv.begin);
  for (const auto& iv : coarse) {
    if (!fine_begins.contains(iv.begin)) return false;
  }
  for (const auto& iv : fine) {
    auto it = std::upper_bound(coarse.begin(), coarse.end(), iv.begin,
                               [](double x, const Interval& c) { return x < c.begin; });
    if (it == coarse.begin()) return false;
    --it;
    if (iv.end > it->end + 1e-12) return false;
  }
  return true;
}

std::vector<double> random_levels(RngStream& rng, std::size_t count) {
  std::vector<double> t{0.0};
  for (std::size_t i = 1; i < count; ++i) t.push_back(std::exp(-4.0 + 8.0 * rng.uniform()));
  std::sort(t.begin(), t.end());
  return t;
}

std::size_t refinement_violations(const ExcursionPath& path, std::span<const double> levels) {
  std::size_t bad = 0;
  auto coarse = t_intervals(path, levels[0]);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    auto fine = t_intervals(path, levels[i]);
    if (!refines(fine, coarse)) ++bad;
    coarse = std::move(fine);
  }
  return bad;
}

// 6. t-intervals refine as t grows.
CriterionResult interval_refinement(std::uint64_t seed) {
  CriterionResult r;
  RngStream rng = criterion_stream(seed, 6);
  constexpr std::size_t kPaths = 1000;
  constexpr std::size_t kLevels = 12;
  std::vector<std::size_t> jump_bad(kPaths, 0);
  std::vector<std::size_t> grid_bad(kPaths, 0);
  parallel_for(kPaths, [&](std::size_t i) {
    RngStream s = rng.split(i);
    const std::size_t jumps = 2 + s.uniform_index(39);
    std::vector<double> masses(jumps);
    for (auto& m : masses) m = s.exponential(1.0);
    const auto path = vervaat_transform(build_bridge(rank_normalized(masses), s));
    jump_bad[i] = refinement_violations(path, random_levels(s, kLevels));
    const auto grid = brownian_excursion(1000, s);
    grid_bad[i] = refinement_violations(grid, random_levels(s, kLevels));
  });
  const auto jb = std::accumulate(jump_bad.begin(), jump_bad.end(), std::size_t{0});
  const auto gb = std::accumulate(grid_bad.begin(), grid_bad.end(), std::size_t{0});
  r.statistical_pass = jb == 0 && gb == 0;
  r.detail = printf_string("violations: %zu on %zu jump paths, %zu on %zu grid excursions", jb, kPaths, gb, kPaths);
  return r;
}

// 7. Largest fragment of the excursion construction vs the monodisperse coalescent at standard time 0.
CriterionResult standard_cross_check(std::uint64_t seed) {
  CriterionResult r;
  RngStream rng = criterion_stream(seed, 7);
  constexpr std::size_t kSize = 10000;
  constexpr std::size_t kSamples = 1000;
  RngStream excursion_rng = rng.split(0);
  RngStream coalescent_rng = rng.split(1);
  const auto initial = monodisperse(kSize);
  const double elapsed = standard_elapsed(kSize, 0.0);
  std::vector<double> a(kSamples);
  std::vector<double> b(kSamples);
  parallel_for(kSamples, [&](std::size_t i) {
    RngStream s = excursion_rng.split(i);
    a[i] = standard_coalescent_marginal(kSize, 0.0, s).largest();
    RngStream c = coalescent_rng.split(i);
    AdditiveCoalescent run(initial);
    run.run_until(elapsed, c);
    b[i] = run.state().largest();
  });
  const auto t = ks_two_sample(a, b);
  r.statistical_pass = t.p_value > 1e-3;
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / kSamples;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / kSamples;
  r.detail = printf_string("D=%.4f p=%.4g mean largest %.4f vs %.4f", t.statistic, t.p_value, mean_a, mean_b);
  return r;
}

// 8. Numerical inversion against the Brownian closed form.
CriterionResult phi_inversion(std::uint64_t) {
  CriterionResult r;
  const auto spec = LevySpec::brownian();
  double worst = 0.0;
  for (double q : {0.1, 1.0, 10.0}) {
    for (double s : {0.5, 1.0, 2.0}) {
      const double exact = (std::sqrt(1.0 + 2.0 * s * s * q) - 1.0) / (s * s);
      worst = std::max(worst, std::abs(phi(spec, q, s) - exact) / exact);
    }
  }
  r.statistical_pass = worst <= 1e-10;
  r.detail = printf_string("max relative error %.3g (tolerance 1e-10)", worst);
  return r;
}

constexpr std::array<double, 4> kLaplaceQ{0.5, 1.0, 2.0, 5.0};
constexpr std::array<double, 3> kLaplaceT{-1.0, 0.0, 1.0};

// 9. Quadrature of the closed-form density against the Laplace functional.
CriterionResult laplace_identity(std::uint64_t) {
  CriterionResult r;
  double worst = 0.0;
  for (double t : kLaplaceT) worst = std::max(worst, verify_laplace_identity(t, kLaplaceQ));
  r.statistical_pass = worst <= 1e-6;
  r.detail = printf_string("max relative gap %.3g (tolerance 1e-6)", worst);
  return r;
}

// 10. Reduced evolution equation for the Laplace functional.
CriterionResult pde_check(std::uint64_t) {
  CriterionResult r;
  const auto sol = EternalSolution::brownian();
  double worst = 0.0;
  for (double t : kLaplaceT) {
    for (double q : kLaplaceQ) worst = std::max(worst, pde_residual(sol, t, q));
  }
  r.statistical_pass = worst <= 1e-4;
  r.detail = printf_string("max residual %.3g (tolerance 1e-4)", worst);
  return r;
}

// 11. Size-biased cluster mass of the n = 10^4 coalescent at standard time 0 vs x mu_0(dx).
CriterionResult mean_field(std::uint64_t seed) {
  CriterionResult r;
  RngStream rng = criterion_stream(seed, 11);
  MeanFieldOptions options;
  options.samples = 1000;
  RngStream unit_rng = rng.split(0);
  const auto t = mean_field_check(10000, 0.0, unit_rng, options);
  r.statistical_pass = t.statistic <= 0.05;
  r.detail = printf_string("D=%.4f (limit 0.05) p=%.3g", t.statistic, t.p_value);
  // Same comparison for a system carrying 100 units of mass, where clusters
  // are small against the total.
  options.volume = 100.0;
  RngStream bulk_rng = rng.split(1);
  const auto bulk = mean_field_check(10000, 0.0, bulk_rng, options);
  r.note = printf_string("total mass 100: D=%.4f p=%.3g", bulk.statistic, bulk.p_value);
  return r;
}

// 12. Record sets are nested: records for s are records for s' < s.
CriterionResult nesting(std::uint64_t seed) {
  CriterionResult r;
  RngStream rng = criterion_stream(seed, 12);
  constexpr std::size_t kPaths = 1000;
  constexpr std::size_t kSteps = 100000;
  const auto spec = LevySpec::brownian();
  std::vector<char> ok(kPaths, 0);
  parallel_for(kPaths, [&](std::size_t i) {
    RngStream s = rng.split(i);
    const auto path = simulate_path(spec, 1.0, 1.0 / kSteps, s);
    ok[i] = check_nesting(path, 2.0, 1.0) ? 1 : 0;
  });
  const auto bad = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 0));
  r.statistical_pass = bad == 0;
  r.detail = printf_string("violations: %zu of %zu paths", bad, kPaths);
  return r;
}

// 13. Event-driven evolution conserves momentum and matches the isotonic oracle.
CriterionResult sticky_oracle(std::uint64_t seed) {
  CriterionResult r;
  RngStream rng = criterion_stream(seed, 13);
  constexpr std::size_t kSeeds = 100;
  constexpr std::size_t kParticles = 1000;
  constexpr double kDr = 1e-3;
  struct Outcome {
    bool same_blocks = false;
    double position_gap = 0.0;
    double momentum_error = 0.0;
  };
  std::vector<Outcome> out(kSeeds);
  parallel_for(kSeeds, [&](std::size_t i) {
    RngStream s = rng.split(i);
    const auto path = simulate_path(LevySpec::brownian(), kParticles * kDr + kDr, kDr, s);
    const auto system = initial_system(path, kParticles, kDr);
    const auto evolved = evolve(system, 1.0).final_state;
    const auto oracle = variational_oracle(system, 1.0);
    Outcome& o = out[i];
    o.same_blocks = evolved.blocks() == oracle.blocks();
    if (o.same_blocks) {
      for (std::size_t c = 0; c < oracle.clusters.size(); ++c) {
        o.position_gap = std::max(o.position_gap, std::abs(evolved.clusters[c].position - oracle.clusters[c].position));
      }
    }
    const double p0 = system.total_momentum();
    o.momentum_error = std::abs(evolved.total_momentum() - p0) / std::abs(p0);
  });
  std::size_t mismatched = 0;
  double gap = 0.0;
  double momentum = 0.0;
  for (const auto& o : out) {
    mismatched += o.same_blocks ? 0 : 1;
    gap = std::max(gap, o.position_gap);
    momentum = std::max(momentum, o.momentum_error);
  }
  r.statistical_pass = mismatched == 0 && gap <= 1e-6 && momentum <= 1e-9;
  r.detail = printf_string("block mismatches %zu/%zu, max position gap %.3g, max momentum error %.3g", mismatched,
                           kSeeds, gap, momentum);
  return r;
}

// 14. Next-merge pairs in merger histories of picked sticky clusters follow x_i + x_j.
CriterionResult merger_signature(std::uint64_t seed) {
  CriterionResult r;
  RngStream rng = criterion_stream(seed, 14);
  constexpr double kTime = 1.0;
  constexpr double kDr = 1e-4;
  constexpr std::size_t kWindows = 20;  // picks in [j, j + 1) for j = 0..kWindows-3
  constexpr std::size_t kTargetPicks = 10000;
  const auto particles = static_cast<std::size_t>(std::llround(kWindows / kDr));

  struct SystemResult {
    std::size_t picks = 0;
    std::vector<PairObservation> observations;
  };
  auto run_system = [&](std::size_t index) {
    RngStream s = rng.split(index);
    const auto path = simulate_path(LevySpec::brownian(), kWindows + kDr, kDr, s);
    const auto result = evolve(initial_system(path, particles, kDr), kTime);
    RngStream ties = s.split(1);
    SystemResult out;
    for (std::size_t j = 0; j + 2 < kWindows; ++j) {
      const double a = static_cast<double>(j);
      // Half-open window [a, a + 1).
      const double b = std::nextafter(a + 1.0, a);
      if (std::none_of(result.final_state.clusters.begin(), result.final_state.clusters.end(),
                       [&](const Cluster& c) { return c.position >= a && c.position <= b; })) {
        continue;
      }
      const auto history = merger_history(result.log, pick_cluster(result.final_state, a, b), kTime);
      ++out.picks;
      auto obs = next_merge_pairs(history, 3, 5, ties);
      out.observations.insert(out.observations.end(), std::make_move_iterator(obs.begin()),
                              std::make_move_iterator(obs.end()));
    }
    return out;
  };

  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::array<double, 2>> cells;
  std::size_t picks = 0;
  std::size_t observations = 0;
  std::size_t systems = 0;
  const unsigned batch = std::max(1u, std::thread::hardware_concurrency());
  while (picks < kTargetPicks) {
    std::vector<SystemResult> results(batch);
    parallel_for(batch, [&](std::size_t i) { results[i] = run_system(systems + i); });
    for (auto& res : results) {
      if (picks >= kTargetPicks) break;
      ++systems;
      picks += res.picks;
      for (const auto& o : res.observations) {
        const std::size_t k = o.masses.size();
        ++observations;
        cells[{k, o.i, o.j}][0] += 1.0;
        for (std::size_t a = 0; a < k; ++a) {
          for (std::size_t b = a + 1; b < k; ++b) {
            cells[{k, a, b}][1] += (o.masses[a] + o.masses[b]) / static_cast<double>(k - 1);
          }
        }
      }
    }
  }
  std::vector<double> observed;
  std::vector<double> expected;
  for (const auto& [key, c] : cells) {
    observed.push_back(c[0]);
    expected.push_back(c[1]);
  }
  // One normalization per block count.
  const auto t = chi_square_counts(observed, expected, 3);
  r.statistical_pass = t.p_value > 1e-3;
  r.detail = printf_string("%zu picks from %zu systems, %zu states, chi2=%.2f df=%zu p=%.3g", picks, systems,
                           observations, t.statistic, observed.size() - 3, t.p_value);
  return r;
}

struct Criterion {
  const char* name;
  double budget_seconds;
  CriterionResult (*run)(std::uint64_t);
};

const std::array<Criterion, kCriterionCount>& criteria() {
  static const std::array<Criterion, kCriterionCount> table{{
      {"pair-selection law", 5.0, pair_selection},
      {"jump-time law", 30.0, jump_time_law},
      {"jump times independent of states", 0.0, jump_state_independence},
      {"tree chain equals direct chain", 60.0, tree_vs_direct},
      {"bridge chain equals direct chain", 0.0, bridge_vs_direct},
      {"t-interval refinement", 0.0, interval_refinement},
      {"standard coalescent cross-check", 300.0, standard_cross_check},
      {"inverse exponent closed form", 0.0, phi_inversion},
      {"Laplace functional quadrature", 1.0, laplace_identity},
      {"reduced evolution equation", 0.0, pde_check},
      {"mean-field size-biased mass", 120.0, mean_field},
      {"record-set nesting", 0.0, nesting},
      {"sticky conservation and oracle", 60.0, sticky_oracle},
      {"merger-history pair signature", 600.0, merger_signature},
  }};
  return table;
}

}  // namespace

std::string criterion_name(int id) {
  if (id < 1 || id > kCriterionCount) throw InvalidArgument("criterion id out of range: " + std::to_string(id));
  return criteria()[static_cast<std::size_t>(id - 1)].name;
}

CriterionResult run_criterion(int id, std::uint64_t seed) {
  if (id < 1 || id > kCriterionCount) throw InvalidArgument("criterion id out of range: " + std::to_string(id));
  const auto& c = criteria()[static_cast<std::size_t>(id - 1)];
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r = c.run(seed);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.id = id;
  r.name = c.name;
  r.budget_seconds = c.budget_seconds;
  return r;
}

std::string format_result(const CriterionResult& r) {
  std::string line = printf_string("%s %2d  %-34s %s", r.pass() ? "PASS" : "FAIL", r.id, r.name.c_str(),
                                   r.detail.c_str());
  if (!r.note.empty()) line += " [" + r.note + "]";
  if (!r.within_budget()) line += printf_string(" [runtime %.1fs over %.0fs budget]", r.seconds, r.budget_seconds);
  return line;
}

std::vector<CriterionResult> run_acceptance(std::uint64_t seed, const std::vector<int>& ids, std::ostream& report,
                                            std::ostream* timing) {
  std::vector<int> order = ids;
  if (order.empty()) {
    for (int i = 1; i <= kCriterionCount; ++i) order.push_back(i);
  }
  std::vector<CriterionResult> out;
  for (int id : order) {
    out.push_back(run_criterion(id, seed));
    report << format_result(out.back()) << '\n' << std::flush;
    if (timing != nullptr) *timing << printf_string("criterion %2d: %.2fs", id, out.back().seconds) << '\n';
  }
  const auto passed = std::count_if(out.begin(), out.end(), [](const CriterionResult& r) { return r.pass(); });
  report << passed << "/" << out.size() << " criteria passed\n";
  return out;
}

}  // namespace addcoal
