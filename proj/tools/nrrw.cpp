// nrrw command line: simulate, experiment, verify, oracle, export.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nrrw/errors.hpp"
#include "nrrw/export.hpp"
#include "nrrw/harness.hpp"
#include "nrrw/oracles.hpp"
#include "nrrw/statistics.hpp"

namespace fs = std::filesystem;
using namespace nrrw;

namespace {

// NRRW_OUT wins over any --out flag or config value.
fs::path output_dir(const fs::path& requested) {
  if (const char* env = std::getenv("NRRW_OUT"); env != nullptr && *env != '\0') return env;
  return requested;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

struct RunArgs {
  std::uint64_t s = 2;
  std::uint64_t nodes = 1000;
  std::uint64_t seed = 0;
};

void add_run_args(CLI::App* app, RunArgs& args) {
  app->add_option("--s", args.s, "step parameter")->required();
  app->add_option("--nodes", args.nodes, "target vertex count N")->required();
  app->add_option("--seed", args.seed, "64-bit seed");
}

int cmd_simulate(const RunArgs& args, bool trajectory, const fs::path& out_flag) {
  SimConfig config{args.s, args.nodes, args.seed, trajectory};
  if (config.exploratory()) {
    std::cerr << "note: odd s > 1 is simulated but no result about the process covers it\n";
  }
  const RunResult result = run(config);
  const fs::path dir = output_dir(out_flag);
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "tree.edges");
    write_edge_list(out, result.tree, config);
  }
  write_statistics(dir, result.stats);
  if (trajectory) {
    auto out = open_out(dir / "trajectory.csv");
    write_trajectory_csv(out, result.trajectory);
  }
  std::cout << "s=" << args.s << " N=" << args.nodes << " seed=" << args.seed
            << " leaves=" << result.stats.leaves.leaves()
            << " max_depth=" << result.stats.depths.max_depth
            << " root_visits=" << result.stats.visits.visits(GrowingTree::root)
            << " parity_changes=" << result.stats.parity_changes << " steps_per_second="
            << static_cast<double>(config.total_steps()) / std::max(result.seconds, 1e-9)
            << "\nwrote " << dir.string() << '\n';
  return 0;
}

void emit_report(const VerificationReport& report, const std::optional<fs::path>& dir) {
  write_report_text(std::cout, report);
  if (dir) {
    fs::create_directories(*dir);
    auto out = open_out(*dir / "report.jsonl");
    write_report_jsonl(out, report);
    auto text = open_out(*dir / "report.txt");
    write_report_text(text, report);
  }
}

int cmd_export(const RunArgs& args, const std::string& what, const std::string& format,
               const fs::path& out_flag) {
  if (what == "tree" && format != "edgelist" && format != "dot") {
    throw UsageError("tree export supports edgelist or dot, not " + format);
  }
  if (what == "stats" && format != "csv") {
    throw UsageError("stats export supports csv only, not " + format);
  }
  SimConfig config{args.s, args.nodes, args.seed};
  const RunResult result = run(config);
  const fs::path dir = output_dir(out_flag);
  fs::create_directories(dir);
  if (what == "stats") {
    write_statistics(dir, result.stats);
    auto out = open_out(dir / "ccdf.csv");
    write_ccdf_csv(out, empirical_ccdf(result.stats.degrees, CcdfCondition::all));
  } else if (format == "edgelist") {
    auto out = open_out(dir / "tree.edges");
    write_edge_list(out, result.tree, config);
  } else {
    auto out = open_out(dir / "tree.dot");
    write_dot(out, result.tree);
  }
  std::cout << "wrote " << dir.string() << '\n';
  return 0;
}

// Closed forms go through a buffer so a domain error prints no partial CSV.
template <class Fill>
void emit_csv(int& status, Fill&& fill) {
  std::ostringstream csv;
  csv << std::setprecision(17);
  fill(csv);
  std::cout << csv.str();
  status = 0;
}

void add_oracle_commands(CLI::App& oracle_cmd, int& status) {
  oracle_cmd.require_subcommand(1);
  static std::uint64_t s = 2, kmax = 20, d0 = 1, top = 200, z = 2;
  static std::string variant = "non-root";

  auto* pmf = oracle_cmd.add_subcommand("t-pmf", "P(T = 2k+1)");
  pmf->add_option("--s", s)->required();
  pmf->add_option("--kmax", kmax);
  pmf->callback([&] {
    emit_csv(status, [](std::ostream& csv) {
      csv << "k,p\n";
      for (std::uint64_t k = 0; k <= kmax; ++k) csv << k << ',' << oracle::t_pmf(s, k) << '\n';
    });
  });

  auto* ccdf = oracle_cmd.add_subcommand("t-ccdf", "P(T >= 2k+1)");
  ccdf->add_option("--s", s)->required();
  ccdf->add_option("--kmax", kmax);
  ccdf->callback([&] {
    emit_csv(status, [](std::ostream& csv) {
      csv << "k,p\n";
      for (std::uint64_t k = 0; k <= kmax; ++k) csv << k << ',' << oracle::t_ccdf(s, k) << '\n';
    });
  });

  auto* star = oracle_cmd.add_subcommand("star-tail", "star-process degree tail");
  star->add_option("--s", s)->required();
  star->add_option("--kmax", kmax);
  star->add_option("--variant", variant, "non-root | root");
  star->callback([&] {
    emit_csv(status, [](std::ostream& csv) {
      const auto v = oracle::parse_star_variant(variant);
      csv << "k,p\n";
      for (std::uint64_t k = 1; k <= kmax; ++k) csv << k << ',' << oracle::star_tail(s, k, v) << '\n';
    });
  });

  auto* expect = oracle_cmd.add_subcommand("expectation", "E(T) and the leaf-fraction bound");
  expect->add_option("--s", s)->required();
  expect->callback([&] {
    emit_csv(status, [](std::ostream& csv) {
      csv << "s,expectation,leaf_fraction_bound\n"
          << s << ',' << oracle::t_expectation(s) << ',' << oracle::leaf_fraction_lower_bound(s)
          << '\n';
    });
  });

  auto* zeta = oracle_cmd.add_subcommand("zeta", "Riemann zeta at an integer >= 2");
  zeta->add_option("--z", z)->required();
  zeta->callback([&] {
    emit_csv(status, [](std::ostream& csv) {
      const auto value = oracle::zeta(z);
      csv << "z,value,error_bound,terms\n"
          << z << ',' << value.value << ',' << value.error_bound << ',' << value.terms << '\n';
    });
  });

  auto* bounce = oracle_cmd.add_subcommand("bounce-bound", "consecutive two-step return bound");
  bounce->add_option("--d0", d0)->required();
  bounce->add_option("--kmax", kmax);
  bounce->callback([&] {
    emit_csv(status, [](std::ostream& csv) {
      csv << "k,bound,envelope_stated,envelope_stirling\n";
      for (std::uint64_t k = 1; k <= kmax; ++k) {
        csv << k << ',' << oracle::bounce_bound(d0, k) << ','
            << oracle::bounce_envelope_stated(d0, k) << ','
            << oracle::bounce_envelope_stirling(d0, k) << '\n';
      }
    });
  });

  auto* lazy = oracle_cmd.add_subcommand("lazy-walk", "return probability f0 of the lazy walk");
  lazy->add_option("--top", top, "truncation state for the linear solve");
  lazy->callback([&] {
    emit_csv(status, [](std::ostream& csv) {
      const oracle::LazyWalkSpec spec;
      csv << "f0_ratio,f0_truncated,top\n"
          << oracle::lazy_walk_return_probability(spec) << ','
          << oracle::lazy_walk_return_probability_truncated(spec, top) << ',' << top << '\n';
    });
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"No Restart Random Walk simulator"};
  app.require_subcommand(1);
  int status = 0;

  RunArgs sim_args;
  bool trajectory = false;
  fs::path sim_out = "nrrw-out";
  auto* simulate = app.add_subcommand("simulate", "run one simulation and write its artifacts");
  add_run_args(simulate, sim_args);
  simulate->add_flag("--trajectory", trajectory, "also write trajectory.csv");
  simulate->add_option("--out", sim_out, "output directory");
  simulate->callback([&] { status = cmd_simulate(sim_args, trajectory, sim_out); });

  fs::path config_file;
  unsigned jobs = 0;
  std::optional<std::uint64_t> exp_replicas, exp_seed;
  std::optional<fs::path> exp_out;
  auto* experiment = app.add_subcommand("experiment", "run a replicated experiment from JSON");
  experiment->add_option("--config", config_file)->required()->check(CLI::ExistingFile);
  experiment->add_option("--jobs", jobs, "worker threads (0: hardware)");
  experiment->add_option("--replicas", exp_replicas);
  experiment->add_option("--seed", exp_seed, "base seed");
  experiment->add_option("--out", exp_out, "output directory");
  experiment->callback([&] {
    ExperimentSpec spec = load_spec(config_file);
    if (experiment->count("--jobs") > 0) spec.jobs = jobs;
    if (exp_replicas) spec.replicas = *exp_replicas;
    if (exp_seed) spec.base_seed = *exp_seed;
    if (exp_out) spec.output_dir = *exp_out;
    spec.output_dir = output_dir(spec.output_dir);
    const VerificationReport report = run_experiment(spec);
    write_report_text(std::cout, report);
    status = report.pass() ? 0 : 1;
  });

  std::vector<std::string> suites;
  SuiteParams params;
  std::optional<fs::path> verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "run verification suites");
  verify_cmd->add_option("--suite", suites, "suite name (repeatable, or 'all')")->required();
  verify_cmd->add_option("--s", params.step_parameter);
  verify_cmd->add_option("--nodes", params.nodes);
  verify_cmd->add_option("--replicas", params.replicas);
  verify_cmd->add_option("--seed", params.base_seed, "base seed");
  verify_cmd->add_option("--jobs", params.jobs);
  verify_cmd->add_option("--out", verify_out, "also write report.jsonl here");
  verify_cmd->callback([&] {
    if (suites.size() == 1 && suites.front() == "all") suites = suite_names();
    VerificationReport report;
    for (const auto& name : suites) {
      report.suites.push_back(verify(name, params));
      report.seconds += report.suites.back().seconds;
    }
    std::optional<fs::path> dir = verify_out;
    if (const char* env = std::getenv("NRRW_OUT"); env != nullptr && *env != '\0') dir = env;
    emit_report(report, dir);
    status = report.pass() ? 0 : 1;
  });

  auto* oracle_cmd = app.add_subcommand("oracle", "print a closed form as CSV");
  add_oracle_commands(*oracle_cmd, status);

  RunArgs export_args;
  std::string what, format;
  fs::path export_out = "nrrw-out";
  auto* export_cmd = app.add_subcommand("export", "simulate and export the tree or statistics");
  add_run_args(export_cmd, export_args);
  export_cmd->add_option("--what", what)->required()->check(CLI::IsMember({"tree", "stats"}));
  export_cmd->add_option("--format", format)->required();
  export_cmd->add_option("--out", export_out, "output directory");
  export_cmd->callback([&] { status = cmd_export(export_args, what, format, export_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
