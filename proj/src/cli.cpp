#include "addcoal/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "addcoal/acceptance.hpp"
#include "addcoal/bridge.hpp"
#include "addcoal/coalescent.hpp"
#include "addcoal/core.hpp"
#include "addcoal/parallel.hpp"
#include "addcoal/random_tree.hpp"
#include "addcoal/rng.hpp"
#include "addcoal/smoluchowski.hpp"
#include "addcoal/sticky.hpp"

namespace addcoal {

void ExperimentConfig::validate() const {
  if (n == 0) throw InvalidArgument("--n must be positive");
  if (replicates == 0) throw InvalidArgument("--replicates must be positive");
  if (grid < 2) throw InvalidArgument("--grid must be at least 2");
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("--step must be positive");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("--sigma2 must be non-negative");
  if (!std::isfinite(t)) throw InvalidArgument("--t must be finite");
  for (const auto& a : atoms) {
    if (!(a.size > 0.0) || !(a.rate > 0.0)) throw InvalidArgument("--atom needs positive size and rate");
  }
  if (command == Subcommand::sticky && t < 0.0) throw InvalidArgument("--t must be non-negative for sticky");
  if (command == Subcommand::smoluchowski && density && !spec().is_brownian()) {
    throw InvalidArgument("--density is only available for sigma2 = 1 without atoms");
  }
  if (command == Subcommand::smoluchowski && density && sigma2 != 1.0) {
    throw InvalidArgument("--density requires --sigma2 1");
  }
  if ((command == Subcommand::levy || command == Subcommand::sticky) && sigma2 == 0.0 && atoms.empty()) {
    throw InvalidArgument("the exponent has neither a Gaussian part nor jumps");
  }
  for (int id : criteria) {
    if (id < 1 || id > kCriterionCount) throw InvalidArgument("--criterion must lie in 1.." + std::to_string(kCriterionCount));
  }
}

namespace {

using Row = std::vector<Table::Cell>;

std::vector<std::string> with_masses(std::vector<std::string> head, std::size_t count) {
  for (auto& c : numbered_columns("m", count)) head.push_back(std::move(c));
  return head;
}

void append_masses(Row& row, const RankedMassVector& v, std::size_t limit) {
  for (std::size_t i = 0; i < std::min(limit, v.size()); ++i) row.emplace_back(v[i]);
}

auto as_int(std::size_t x) { return static_cast<std::int64_t>(x); }

// Each replicate produces its rows independently; rows are appended in replicate order.
template <class Fn>
void fill_by_replicate(Table& table, const ExperimentConfig& c, std::uint32_t tag, Fn&& rows_for) {
  const RngStream master(c.seed, stream_id(tag, 0));
  auto blocks = parallel_map<std::vector<Row>>(c.replicates, [&](std::size_t r) {
    RngStream rng = master.split(r);
    return rows_for(r, rng);
  });
  for (auto& block : blocks) {
    for (auto& row : block) table.add_row(std::move(row));
  }
}

Table coalescent_table(const ExperimentConfig& c) {
  Table table(with_masses({"replicate", "step", "time", "holding_time", "clusters"}, c.n));
  const auto initial = monodisperse(c.n);
  fill_by_replicate(table, c, 1, [&](std::size_t r, RngStream& rng) {
    const auto tr = simulate(initial, rng);
    std::vector<Row> rows;
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      const double time = k ? tr.jump_times[k - 1] : 0.0;
      const double hold = k ? time - (k > 1 ? tr.jump_times[k - 2] : 0.0) : 0.0;
      Row row{as_int(r), as_int(k), time, hold, as_int(tr.states[k].size())};
      append_masses(row, tr.states[k], c.n);
      rows.push_back(std::move(row));
    }
    return rows;
  });
  return table;
}

Table tree_table(const ExperimentConfig& c) {
  Table table(with_masses({"replicate", "step", "edge_a", "edge_b", "clusters"}, c.n));
  fill_by_replicate(table, c, 2, [&](std::size_t r, RngStream& rng) {
    const auto chain = forest_chain(sample_uniform_tree(c.n, rng), rng);
    std::vector<Row> rows;
    for (std::size_t k = 0; k < chain.states.size(); ++k) {
      Row row{as_int(r), as_int(k)};
      if (k == 0) {
        row.emplace_back(std::monostate{});
        row.emplace_back(std::monostate{});
      } else {
        row.emplace_back(static_cast<std::int64_t>(chain.opening_order[k - 1].first));
        row.emplace_back(static_cast<std::int64_t>(chain.opening_order[k - 1].second));
      }
      row.emplace_back(as_int(chain.states[k].size()));
      append_masses(row, chain.states[k], c.n);
      rows.push_back(std::move(row));
    }
    return rows;
  });
  return table;
}

// Grid excursion with `grid` steps fragmented at level e^{-t}: the standard
// additive coalescent at time t. The n largest blocks are reported.
Table bridge_table(const ExperimentConfig& c) {
  Table table(with_masses({"replicate", "t", "blocks"}, c.n));
  fill_by_replicate(table, c, 3, [&](std::size_t r, RngStream& rng) {
    const auto masses = standard_coalescent_marginal(c.grid, c.t, rng);
    Row row{as_int(r), c.t, as_int(masses.size())};
    append_masses(row, masses, c.n);
    return std::vector<Row>{std::move(row)};
  });
  return table;
}

// Path on [0, grid * step) with the record indicator for s = e^t.
Table levy_table(const ExperimentConfig& c) {
  Table table({"replicate", "index", "r", "xi", "record"});
  const auto spec = c.spec();
  const double s = std::exp(c.t);
  fill_by_replicate(table, c, 4, [&](std::size_t r, RngStream& rng) {
    const auto path = simulate_path(spec, static_cast<double>(c.grid) * c.step, c.step, rng);
    const auto records = record_set(path, s);
    std::vector<Row> rows;
    std::size_t next = 0;
    for (std::size_t k = 0; k < path.size(); ++k) {
      const bool is_record = next < records.size() && records[next] == k;
      if (is_record) ++next;
      rows.push_back({as_int(r), as_int(k), static_cast<double>(k) * c.step, path.values[k],
                      static_cast<std::int64_t>(is_record)});
    }
    return rows;
  });
  return table;
}

// x_k = k / 100 for k = 1..grid, or q on the same grid for the Laplace functional.
Table smoluchowski_table(const ExperimentConfig& c) {
  if (c.density) {
    Table table({"x", "density"});
    for (std::size_t k = 1; k <= c.grid; ++k) {
      const double x = static_cast<double>(k) / 100.0;
      table.add_row({x, brownian_density(c.t, x)});
    }
    return table;
  }
  Table table({"q", "phi"});
  const EternalSolution sol(c.spec());
  for (std::size_t k = 1; k <= c.grid; ++k) {
    const double q = static_cast<double>(k) / 100.0;
    table.add_row({q, laplace_functional(sol, q, c.t)});
  }
  return table;
}

// n particles of mass `step` with velocities from the spec, evolved to t.
Table sticky_table(const ExperimentConfig& c) {
  Table table({"replicate", "time", "left_id", "right_id", "location", "merged_mass"});
  const auto spec = c.spec();
  fill_by_replicate(table, c, 6, [&](std::size_t r, RngStream& rng) {
    const auto path = simulate_path(spec, static_cast<double>(c.n + 1) * c.step, c.step, rng);
    const auto result = evolve(initial_system(path, c.n, c.step), c.t);
    std::vector<Row> rows;
    rows.reserve(result.log.events.size());
    for (const auto& e : result.log.events) {
      rows.push_back({as_int(r), e.time, static_cast<std::int64_t>(e.left_id), static_cast<std::int64_t>(e.right_id),
                      e.location, e.merged_mass});
    }
    return rows;
  });
  return table;
}

}  // namespace

Table run_experiment(const ExperimentConfig& c) {
  c.validate();
  switch (c.command) {
    case Subcommand::coalescent:
      return coalescent_table(c);
    case Subcommand::tree:
      return tree_table(c);
    case Subcommand::bridge:
      return bridge_table(c);
    case Subcommand::levy:
      return levy_table(c);
    case Subcommand::smoluchowski:
      return smoluchowski_table(c);
    case Subcommand::sticky:
      return sticky_table(c);
    case Subcommand::verify:
      break;
  }
  throw InvalidArgument("verify does not produce a table");
}

int run(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  c.validate();
  std::ofstream file;
  if (!c.output.empty()) {
    file.open(c.output, std::ios::binary);
    if (!file) throw InvalidArgument("cannot open output file " + c.output);
  }
  std::ostream& sink = c.output.empty() ? out : file;
  if (c.command == Subcommand::verify) {
    const auto results = run_acceptance(c.seed, c.criteria, sink, &err);
    const bool ok = std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass(); });
    return ok ? 0 : 1;
  }
  run_experiment(c).write(sink, c.format);
  return 0;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Additive coalescent constructions and cross-checks"};
  app.require_subcommand(1);
  ExperimentConfig c;
  std::vector<std::string> atoms;
  std::string format = "csv";

  const std::map<std::string, Subcommand> names{
      {"coalescent", Subcommand::coalescent}, {"tree", Subcommand::tree},
      {"bridge", Subcommand::bridge},         {"levy", Subcommand::levy},
      {"smoluchowski", Subcommand::smoluchowski}, {"sticky", Subcommand::sticky},
      {"verify", Subcommand::verify}};
  const std::map<std::string, std::string> help{
      {"coalescent", "monodisperse additive coalescent trajectories"},
      {"tree", "edge-deletion chains of uniform random trees"},
      {"bridge", "standard coalescent at time t from a Brownian excursion"},
      {"levy", "spectrally negative Levy path with record indicators"},
      {"smoluchowski", "eternal solution: Laplace functional or density"},
      {"sticky", "sticky particle collision log"},
      {"verify", "run the acceptance suite"}};

  for (const auto& [name, cmd] : names) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--seed", c.seed, "master seed");
    sub->add_option("--output", c.output, "output path (default stdout)");
    if (cmd == Subcommand::verify) {
      sub->add_option("--criterion", c.criteria, "run only these criteria (repeatable)");
      continue;
    }
    sub->add_option("--n", c.n, "number of clusters, particles or reported masses");
    sub->add_option("--t", c.t, "time parameter");
    sub->add_option("--replicates", c.replicates, "independent replicates");
    sub->add_option("--grid", c.grid, "grid size m");
    sub->add_option("--step", c.step, "step h");
    sub->add_option("--sigma2", c.sigma2, "Gaussian coefficient");
    sub->add_option("--atom", atoms, "jump atom x,rate (repeatable)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (cmd == Subcommand::smoluchowski) sub->add_flag("--density", c.density, "tabulate x, density");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out;
    std::ostringstream err_out;
    const int status = app.exit(e, help_out, err_out);
    out << help_out.str();
    err << err_out.str();
    // Help and version requests exit 0; every malformed invocation exits 2.
    return status == 0 ? 0 : 2;
  }

  for (const auto& [name, cmd] : names) {
    if (app.got_subcommand(name)) c.command = cmd;
  }
  c.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
  try {
    for (const auto& a : atoms) {
      const auto comma = a.find(',');
      if (comma == std::string::npos) throw InvalidArgument("--atom expects x,rate but got '" + a + "'");
      std::size_t used_x = 0;
      std::size_t used_rate = 0;
      const std::string xs = a.substr(0, comma);
      const std::string rs = a.substr(comma + 1);
      const double x = std::stod(xs, &used_x);
      const double rate = std::stod(rs, &used_rate);
      if (used_x != xs.size() || used_rate != rs.size()) {
        throw InvalidArgument("--atom expects x,rate but got '" + a + "'");
      }
      c.atoms.push_back({x, rate});
    }
    return run(c, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace addcoal
