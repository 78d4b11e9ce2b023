#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nrrw/statistics.hpp"

namespace nrrw {

struct Cell {
  std::uint64_t step_parameter = 1;
  std::uint64_t nodes = 1;

  bool operator==(const Cell&) const = default;
};

struct ExperimentSpec {
  std::vector<Cell> cells;
  std::uint64_t replicas = 1;
  std::uint64_t base_seed = 0;
  std::vector<std::string> checks;
  std::filesystem::path output_dir = "nrrw-out";
  std::vector<std::uint64_t> snapshot_grid;  ///< empty: 20 log-spaced vertex counts
  unsigned jobs = 0;                         ///< 0: hardware threads
};

/// Throws ConfigError for an empty cell list, zero replicas, invalid cells
/// or unknown check names.
void validate(const ExperimentSpec& spec);

ExperimentSpec spec_from_json(const nlohmann::json& document);
nlohmann::json to_json(const ExperimentSpec& spec);
ExperimentSpec load_spec(const std::filesystem::path& file);

/// splitmix64 chain over (base seed, cell index, replica index).
std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t cell_index,
                           std::uint64_t replica_index);

unsigned resolve_jobs(unsigned jobs);

/// fn(i) for i in [0, count) over `jobs` threads; results come back in
/// index order whatever order they ran in. The first exception is rethrown
/// after all workers stop.
template <class Result, class Fn>
std::vector<Result> parallel_map(std::size_t count, unsigned jobs, Fn&& fn) {
  std::vector<Result> results(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      if (failed) return;
      try {
        results[i] = fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  const unsigned threads = std::min<std::size_t>(resolve_jobs(jobs), std::max<std::size_t>(count, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return results;
}

struct ReplicaResult {
  std::uint64_t replica = 0;
  std::uint64_t seed = 0;
  RunStatistics stats;
  double steps_per_second = 0.0;
  std::optional<std::string> failure;

  bool ok() const noexcept { return !failure.has_value(); }
};

/// Runs `replicas` independent copies of `cell`; replica r uses
/// stream_id = r and seed replica_seed(base_seed, cell_index, r).
/// Failures are caught per replica.
std::vector<ReplicaResult> run_replicas(const Cell& cell, std::uint64_t cell_index,
                                        std::uint64_t replicas, std::uint64_t base_seed,
                                        const StatisticsOptions& options, unsigned jobs,
                                        std::span<const std::uint64_t> order = {});

/// Replica-order reduction of the collectors of one cell.
struct CellSummary {
  Cell cell;
  std::uint64_t replicas = 0;
  std::uint64_t failed = 0;
  DegreeHistogram degrees;
  DegreeHistogram structural_degrees;
  DegreeHistogram root_visits;
  BounceRunLog bounces;
  std::vector<std::pair<std::uint64_t, double>> mean_leaf_fraction;
  double mean_max_depth = 0.0;
};

CellSummary summarize(const Cell& cell, std::span<const ReplicaResult> results);

struct Assertion {
  std::string name;
  bool pass = true;
  std::string detail;
  std::optional<double> worst_excess;
  std::optional<std::uint64_t> worst_k;
  std::uint64_t samples = 0;
};

struct SuiteResult {
  std::string suite;
  std::vector<Assertion> assertions;
  std::vector<std::string> notes;  ///< diagnostics that carry no verdict
  double seconds = 0.0;

  bool pass() const noexcept;
  const Assertion* find(const std::string& name) const;
};

struct VerificationReport {
  std::vector<SuiteResult> suites;
  std::vector<std::string> failed_cells;
  double seconds = 0.0;

  bool pass() const noexcept;
};

void write_report_text(std::ostream& out, const VerificationReport& report);
void write_report_jsonl(std::ostream& out, const VerificationReport& report);

struct SuiteParams {
  std::optional<std::uint64_t> step_parameter;
  std::optional<std::uint64_t> nodes;
  std::optional<std::uint64_t> replicas;
  std::uint64_t base_seed = 20240611;
  unsigned jobs = 0;
};

const std::vector<std::string>& suite_names();

/// Runs one registered suite. Unknown names throw UsageError listing the
/// registered ones.
SuiteResult verify(const std::string& suite, const SuiteParams& params = {});

/// Runs every cell, writes per-cell and per-replica CSVs plus report.txt and
/// report.jsonl under spec.output_dir, then runs the requested suites with
/// the spec's replica count and base seed.
VerificationReport run_experiment(const ExperimentSpec& spec);

}  // namespace nrrw
