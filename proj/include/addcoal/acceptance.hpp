#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace addcoal {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool statistical_pass = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::string detail;  // deterministic for a given seed
  std::string note;    // supplementary, non-gating

  bool within_budget() const { return budget_seconds <= 0.0 || seconds <= budget_seconds; }
  bool pass() const { return statistical_pass && within_budget(); }
};

inline constexpr int kCriterionCount = 14;

std::string criterion_name(int id);

/// Runs acceptance criterion `id` (1..14).
CriterionResult run_criterion(int id, std::uint64_t seed);

/// "PASS  3  name  detail"; runtime overruns are flagged in the line.
std::string format_result(const CriterionResult& r);

/// Runs the listed criteria (all when empty), writing one line per criterion
/// to `report` and timings to `timing` (may be null).
std::vector<CriterionResult> run_acceptance(std::uint64_t seed, const std::vector<int>& ids, std::ostream& report,
                                            std::ostream* timing);

}  // namespace addcoal
