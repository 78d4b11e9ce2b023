#include "nrrw/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nrrw/errors.hpp"
#include "nrrw/prng.hpp"

namespace nrrw {

using nlohmann::json;

void validate(const ExperimentSpec& spec) {
  if (spec.cells.empty()) throw ConfigError("experiment has no cells");
  if (spec.replicas == 0) throw ConfigError("replicas must be >= 1");
  for (const Cell& cell : spec.cells) {
    validate(SimConfig{cell.step_parameter, cell.nodes});
  }
  const auto& known = suite_names();
  for (const auto& check : spec.checks) {
    if (std::find(known.begin(), known.end(), check) == known.end()) {
      throw ConfigError("unknown check '" + check + "'");
    }
  }
}

ExperimentSpec spec_from_json(const json& document) {
  if (!document.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentSpec spec;
  try {
    for (const auto& cell : document.value("cells", json::array())) {
      spec.cells.push_back(
          {cell.at("step_parameter").get<std::uint64_t>(), cell.at("nodes").get<std::uint64_t>()});
    }
    spec.replicas = document.value("replicas", spec.replicas);
    spec.base_seed = document.value("base_seed", spec.base_seed);
    spec.checks = document.value("checks", spec.checks);
    spec.output_dir = document.value("output_dir", spec.output_dir.string());
    spec.snapshot_grid = document.value("snapshot_grid", spec.snapshot_grid);
    spec.jobs = document.value("jobs", spec.jobs);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
  return spec;
}

json to_json(const ExperimentSpec& spec) {
  json cells = json::array();
  for (const Cell& c : spec.cells) cells.push_back({{"step_parameter", c.step_parameter}, {"nodes", c.nodes}});
  return {{"cells", cells},
          {"replicas", spec.replicas},
          {"base_seed", spec.base_seed},
          {"checks", spec.checks},
          {"output_dir", spec.output_dir.string()},
          {"snapshot_grid", spec.snapshot_grid},
          {"jobs", spec.jobs}};
}

ExperimentSpec load_spec(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config " + file.string());
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return spec_from_json(document);
}

std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t cell_index,
                           std::uint64_t replica_index) {
  return mix64(mix64(mix64(base_seed) ^ cell_index) ^ replica_index);
}

unsigned resolve_jobs(unsigned jobs) {
  if (jobs > 0) return jobs;
  return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<ReplicaResult> run_replicas(const Cell& cell, std::uint64_t cell_index,
                                        std::uint64_t replicas, std::uint64_t base_seed,
                                        const StatisticsOptions& options, unsigned jobs,
                                        std::span<const std::uint64_t> order) {
  if (!order.empty() && order.size() != replicas) {
    throw ConfigError("replica order must list every replica once");
  }
  std::vector<ReplicaResult> results(replicas);
  auto one = [&](std::size_t slot) {
    const std::uint64_t r = order.empty() ? slot : order[slot];
    ReplicaResult& result = results.at(r);
    result.replica = r;
    result.seed = replica_seed(base_seed, cell_index, r);
    SimConfig config{cell.step_parameter, cell.nodes, result.seed, false, r};
    try {
      RunResult run_result = run(config, options);
      result.stats = std::move(run_result.stats);
      result.steps_per_second =
          static_cast<double>(config.total_steps()) / std::max(run_result.seconds, 1e-9);
    } catch (const std::exception& e) {
      result.failure = e.what();
    }
    return 0;
  };
  parallel_map<int>(replicas, jobs, one);
  return results;
}

CellSummary summarize(const Cell& cell, std::span<const ReplicaResult> results) {
  CellSummary summary;
  summary.cell = cell;
  summary.replicas = results.size();
  std::vector<std::pair<std::uint64_t, double>> sum;
  std::uint64_t ok = 0;
  double depth = 0.0;
  for (const ReplicaResult& r : results) {
    if (!r.ok()) {
      ++summary.failed;
      continue;
    }
    ++ok;
    summary.degrees.merge(r.stats.degrees);
    summary.structural_degrees.merge(r.stats.structural_degrees);
    summary.root_visits.add(r.stats.visits.visits(GrowingTree::root));
    summary.bounces.merge(r.stats.bounces);
    depth += static_cast<double>(r.stats.depths.max_depth);
    const auto trajectory = leaf_fraction(r.stats.leaves).trajectory;
    if (sum.empty()) {
      sum = trajectory;
    } else {
      for (std::size_t i = 0; i < std::min(sum.size(), trajectory.size()); ++i) {
        sum[i].second += trajectory[i].second;
      }
    }
  }
  if (ok > 0) {
    for (auto& [n, f] : sum) f /= static_cast<double>(ok);
    summary.mean_max_depth = depth / static_cast<double>(ok);
  }
  summary.mean_leaf_fraction = std::move(sum);
  return summary;
}

bool SuiteResult::pass() const noexcept {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const Assertion& a) { return a.pass; });
}

const Assertion* SuiteResult::find(const std::string& name) const {
  for (const auto& a : assertions) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

bool VerificationReport::pass() const noexcept {
  return failed_cells.empty() && std::all_of(suites.begin(), suites.end(),
                                             [](const SuiteResult& s) { return s.pass(); });
}

void write_report_text(std::ostream& out, const VerificationReport& report) {
  for (const auto& suite : report.suites) {
    out << (suite.pass() ? "[PASS] " : "[FAIL] ") << suite.suite << " (" << std::fixed
        << std::setprecision(2) << suite.seconds << " s)\n";
    out << std::defaultfloat;
    for (const auto& a : suite.assertions) {
      out << "  " << (a.pass ? "ok   " : "FAIL ") << a.name;
      if (a.samples > 0) out << " n=" << a.samples;
      if (a.worst_excess) out << " worst_excess=" << *a.worst_excess;
      if (a.worst_k) out << " at k=" << *a.worst_k;
      if (!a.detail.empty()) out << " : " << a.detail;
      out << '\n';
    }
    for (const auto& note : suite.notes) out << "  note " << note << '\n';
  }
  for (const auto& cell : report.failed_cells) out << "[FAIL] cell " << cell << '\n';
  out << (report.pass() ? "PASS" : "FAIL") << " total " << std::fixed << std::setprecision(2)
      << report.seconds << " s\n"
      << std::defaultfloat;
}

void write_report_jsonl(std::ostream& out, const VerificationReport& report) {
  for (const auto& suite : report.suites) {
    json assertions = json::array();
    for (const auto& a : suite.assertions) {
      json entry{{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}, {"samples", a.samples}};
      if (a.worst_excess) entry["worst_excess"] = *a.worst_excess;
      if (a.worst_k) entry["worst_k"] = *a.worst_k;
      assertions.push_back(std::move(entry));
    }
    out << json{{"suite", suite.suite},
                {"pass", suite.pass()},
                {"seconds", suite.seconds},
                {"assertions", assertions},
                {"notes", suite.notes}}
               .dump()
        << '\n';
  }
  out << json{{"summary", true},
              {"pass", report.pass()},
              {"failed_cells", report.failed_cells},
              {"seconds", report.seconds}}
             .dump()
      << '\n';
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string cell_label(std::size_t index, const Cell& cell) {
  return "cell-" + std::to_string(index) + "-s" + std::to_string(cell.step_parameter) + "-n" +
         std::to_string(cell.nodes);
}

void write_cell(const std::filesystem::path& dir, const CellSummary& summary,
                std::span<const ReplicaResult> results) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "degrees.csv");
    write_degrees_csv(out, summary.degrees);
  }
  {
    auto out = open_out(dir / "structural_degrees.csv");
    write_degrees_csv(out, summary.structural_degrees);
  }
  if (!summary.degrees.empty()) {
    auto out = open_out(dir / "ccdf.csv");
    write_ccdf_csv(out, empirical_ccdf(summary.degrees, CcdfCondition::all));
  }
  {
    auto out = open_out(dir / "bounces.csv");
    write_bounces_csv(out, summary.bounces);
  }
  {
    auto out = open_out(dir / "root_visits.csv");
    out << "visits,count\n";
    for (std::size_t j = 0; j < summary.root_visits.counts.size(); ++j) {
      if (summary.root_visits.counts[j] > 0) out << j << ',' << summary.root_visits.counts[j] << '\n';
    }
  }
  {
    auto out = open_out(dir / "leaf_fraction.csv");
    out << "n,mean_fraction\n" << std::setprecision(17);
    for (const auto& [n, f] : summary.mean_leaf_fraction) out << n << ',' << f << '\n';
  }
  {
    auto out = open_out(dir / "replicas.csv");
    out << "replica,seed,status,leaves,max_depth,root_visits,parity_changes\n";
    for (const ReplicaResult& r : results) {
      out << r.replica << ',' << r.seed << ',';
      if (r.ok()) {
        out << "ok," << r.stats.leaves.leaves() << ',' << r.stats.depths.max_depth << ','
            << r.stats.visits.visits(GrowingTree::root) << ',' << r.stats.parity_changes << '\n';
      } else {
        out << "failed,,,,\n";
      }
    }
  }
  for (const ReplicaResult& r : results) {
    if (r.ok()) write_statistics(dir / ("replica-" + std::to_string(r.replica)), r.stats);
  }
}

}  // namespace

VerificationReport run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  const auto start = std::chrono::steady_clock::now();
  VerificationReport report;
  std::filesystem::create_directories(spec.output_dir);

  json timing = json::array();
  StatisticsOptions options;
  options.leaf_grid = spec.snapshot_grid;
  for (std::size_t c = 0; c < spec.cells.size(); ++c) {
    const Cell& cell = spec.cells[c];
    const auto results =
        run_replicas(cell, c, spec.replicas, spec.base_seed, options, spec.jobs);
    const CellSummary summary = summarize(cell, results);
    const std::string label = cell_label(c, cell);
    if (summary.failed > 0) {
      std::string reason;
      for (const auto& r : results) {
        if (!r.ok()) {
          reason = *r.failure;
          break;
        }
      }
      report.failed_cells.push_back(label + ": " + std::to_string(summary.failed) +
                                    " replica(s) failed: " + reason);
    }
    write_cell(spec.output_dir / label, summary, results);
    for (const auto& r : results) {
      timing.push_back({{"cell", label}, {"replica", r.replica}, {"steps_per_second", r.steps_per_second}});
    }
  }

  for (const auto& check : spec.checks) {
    SuiteParams params;
    params.replicas = spec.replicas;
    params.base_seed = spec.base_seed;
    params.jobs = spec.jobs;
    if (spec.cells.size() == 1) {
      params.step_parameter = spec.cells.front().step_parameter;
      params.nodes = spec.cells.front().nodes;
    }
    report.suites.push_back(verify(check, params));
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  {
    auto out = open_out(spec.output_dir / "report.txt");
    write_report_text(out, report);
  }
  {
    auto out = open_out(spec.output_dir / "report.jsonl");
    write_report_jsonl(out, report);
  }
  {
    auto out = open_out(spec.output_dir / "timing.jsonl");
    for (const auto& entry : timing) out << entry.dump() << '\n';
  }
  return report;
}

}  // namespace nrrw
