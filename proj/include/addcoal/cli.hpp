#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "addcoal/levy.hpp"
#include "addcoal/table.hpp"

namespace addcoal {

enum class Subcommand { coalescent, tree, bridge, levy, smoluchowski, sticky, verify };

struct ExperimentConfig {
  Subcommand command = Subcommand::coalescent;
  std::uint64_t seed = 1;
  std::size_t n = 10;
  double t = 0.0;
  std::size_t replicates = 1;
  std::size_t grid = 1000;
  double step = 1e-3;
  double sigma2 = 1.0;
  std::vector<LevyAtom> atoms;
  bool density = false;       // smoluchowski: (x, density) instead of (q, Phi)
  std::vector<int> criteria;  // verify: subset to run, all when empty
  std::string output;         // stdout when empty
  OutputFormat format = OutputFormat::csv;

  /// Throws InvalidArgument naming the offending parameter.
  void validate() const;
  LevySpec spec() const { return LevySpec(sigma2, atoms); }
};

/// Builds the result table of a sampling subcommand (everything but verify).
Table run_experiment(const ExperimentConfig& config);

/// Executes a validated config. Results go to `out` (or the output file),
/// diagnostics to `err`. Returns the process exit status.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs; errors are reported on `err` with a nonzero status.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace addcoal
