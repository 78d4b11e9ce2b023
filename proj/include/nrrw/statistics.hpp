#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nrrw/engine.hpp"
#include "nrrw/tree.hpp"

namespace nrrw {

inline constexpr std::uint64_t never = std::numeric_limits<std::uint64_t>::max();

/// `points` values spaced logarithmically in [lo, hi], rounded, deduplicated,
/// always containing hi.
std::vector<std::uint64_t> log_grid(std::uint64_t lo, std::uint64_t hi, std::size_t points);

/// 20 log-spaced vertex counts in [2, N].
std::vector<std::uint64_t> default_leaf_grid(std::uint64_t target_nodes);

/// 10 log-spaced clock values in [1, T].
std::vector<std::uint64_t> default_checkpoints(std::uint64_t total_steps);

struct StatisticsOptions {
  std::vector<std::uint64_t> leaf_grid;    ///< empty: default_leaf_grid
  std::vector<std::uint64_t> checkpoints;  ///< empty: default_checkpoints
  std::uint64_t tracked_vertices = 10;     ///< vertices 0..m-1 followed at checkpoints
  bool record_depth_trace = false;
  bool monitor_invariants = false;
};

/// Per-vertex visit counts J_i (visits at t >= 1; a self-loop traversal is a
/// visit to the root), first/last visit times and first-attachment time T_j.
class VisitLedger {
 public:
  VisitLedger() { add_vertex(); }

  void reserve(std::uint64_t vertices);
  void add_vertex();
  void record_visit(Vertex v, std::uint64_t time) {
    ++visits_[v];
    if (first_visit_[v] == never) first_visit_[v] = time;
    last_visit_[v] = time;
    ++total_;
  }
  void record_attachment(Vertex at, std::uint64_t time) {
    if (first_attachment_[at] == never) first_attachment_[at] = time;
  }

  std::uint64_t size() const noexcept { return visits_.size(); }
  std::uint64_t visits(Vertex v) const { return visits_.at(v); }
  std::uint64_t first_visit(Vertex v) const { return first_visit_.at(v); }
  std::uint64_t last_visit(Vertex v) const { return last_visit_.at(v); }
  std::uint64_t first_attachment(Vertex v) const { return first_attachment_.at(v); }
  std::uint64_t total_visits() const noexcept { return total_; }
  std::uint64_t max_visits() const noexcept;

 private:
  std::vector<std::uint64_t> visits_;
  std::vector<std::uint64_t> first_visit_;
  std::vector<std::uint64_t> last_visit_;
  std::vector<std::uint64_t> first_attachment_;
  std::uint64_t total_ = 0;
};

/// counts[d] = number of samples equal to d.
struct DegreeHistogram {
  std::vector<std::uint64_t> counts;

  static DegreeHistogram from_tree(const GrowingTree& tree, bool structural = false);
  static DegreeHistogram from_samples(std::span<const std::uint64_t> samples);

  void add(std::uint64_t value, std::uint64_t count = 1);
  void merge(const DegreeHistogram& other);
  std::uint64_t total() const noexcept;
  bool empty() const noexcept { return total() == 0; }

  bool operator==(const DegreeHistogram&) const = default;
};

struct CcdfPoint {
  std::uint64_t k = 0;
  std::uint64_t at_least = 0;  ///< samples with value >= k
  double p = 0.0;              ///< at_least / sample size
};

struct Ccdf {
  std::vector<CcdfPoint> points;
  /// Absent for analytic sequences; present for empirical data.
  std::optional<std::uint64_t> sample_size;

  /// Wraps an analytic tail k -> P(X >= k) evaluated on [k_min, k_max].
  static Ccdf analytic(std::uint64_t k_min, std::uint64_t k_max,
                       const std::function<double(std::uint64_t)>& tail);
  double at(std::uint64_t k) const;
};

enum class CcdfCondition { all, non_leaf };

/// P(deg >= k) for k = 1.. (all) or k = 2.. among degree >= 2 (non_leaf).
Ccdf empirical_ccdf(const DegreeHistogram& histogram, CcdfCondition condition);
/// P(X >= k) for k = 0..max of a sample histogram.
Ccdf sample_ccdf(const DegreeHistogram& histogram);
/// Differencing an empirical CCDF gives back its histogram.
DegreeHistogram histogram_from_ccdf(const Ccdf& ccdf);

struct TailFit {
  double slope = 0.0;  ///< CCDF exponent estimate
  double slope_stderr = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  bool nonlinear = false;  ///< r_squared < 0.99
  std::size_t points = 0;
};

/// Ordinary least squares of log P(X >= k) on log k at up to 50 log-spaced
/// k in [k_min, k_max] (every integer on short ranges).
/// Needs 5 points; for empirical input each point needs `min_support`
/// samples at or above it.
TailFit tail_exponent_fit(const Ccdf& ccdf, std::uint64_t k_min, std::uint64_t k_max,
                          std::uint64_t min_support = 50);

/// k_min = 2, k_max = largest k with at least `min_support` samples >= k.
std::pair<std::uint64_t, std::uint64_t> default_fit_range(const Ccdf& ccdf,
                                                          std::uint64_t min_support = 50);

enum class Direction { at_most, at_least };

struct DominancePoint {
  std::uint64_t k = 0;
  double empirical = 0.0;
  double bound = 0.0;
  double excess = 0.0;  ///< empirical - bound (at_most) or bound - empirical (at_least)
  bool pass = true;
};

struct DominanceReport {
  std::vector<DominancePoint> points;
  double margin = 0.0;  ///< sqrt(ln(2/alpha) / (2n))
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::uint64_t worst_k = 0;
  bool pass = true;
};

/// Compares an empirical CCDF with a bound, allowing a distribution-free
/// two-sided margin valid for the whole curve at level alpha.
DominanceReport dominance_check(const Ccdf& empirical,
                                const std::function<double(std::uint64_t)>& bound,
                                Direction direction, std::uint64_t n_samples, double alpha);

double concentration_margin(std::uint64_t n_samples, double alpha);

/// Leaf counts L_n sampled on a vertex-count grid, plus the renewal marks:
/// times of the additions that did not increase the leaf count.
class LeafFractionSeries {
 public:
  explicit LeafFractionSeries(std::vector<std::uint64_t> grid = {});

  void on_attachment(bool target_was_leaf, std::uint64_t vertex_count, std::uint64_t time);

  std::uint64_t leaves() const noexcept { return leaves_; }
  std::uint64_t vertex_count() const noexcept { return vertex_count_; }
  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& samples() const noexcept {
    return samples_;
  }
  const std::vector<std::uint64_t>& renewal_marks() const noexcept { return renewals_; }
  bool monotone() const noexcept { return monotone_; }

 private:
  std::vector<std::uint64_t> grid_;
  std::size_t next_grid_ = 0;
  std::uint64_t leaves_ = 0;
  std::uint64_t vertex_count_ = 1;
  bool monotone_ = true;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> samples_;
  std::vector<std::uint64_t> renewals_;
};

struct LeafFraction {
  double final_fraction = 0.0;  ///< L_N / N
  std::vector<std::pair<std::uint64_t, double>> trajectory;
};

LeafFraction leaf_fraction(const LeafFractionSeries& series);

/// Walker-step gaps between consecutive renewal marks. The interval before
/// the first mark and the open interval after the last are excluded.
std::vector<std::uint64_t> renewal_gaps(const LeafFractionSeries& series);

struct DepthProfile {
  DegreeHistogram depths;  ///< counts[d] = vertices at depth d
  std::uint64_t max_depth = 0;
  std::vector<std::uint64_t> walker_trace;  ///< depth of W_t, t >= 1, when recorded

  static DepthProfile from_tree(const GrowingTree& tree);
};

/// Completed runs of consecutive two-step returns W_{t0+2m} = W_{t0},
/// keyed by the anchor's degree at t0. Runs start at even times t0 >= s;
/// the run still open when the simulation ends is dropped.
class BounceRunLog {
 public:
  void add(std::uint64_t start_degree, std::uint64_t run_length, std::uint64_t count = 1);
  void merge(const BounceRunLog& other);

  const std::map<std::uint64_t, DegreeHistogram>& by_degree() const noexcept { return runs_; }
  std::uint64_t total_runs() const noexcept;

  bool operator==(const BounceRunLog&) const = default;

 private:
  std::map<std::uint64_t, DegreeHistogram> runs_;
};

struct Checkpoint {
  std::uint64_t time = 0;
  std::uint64_t vertex_count = 0;
  std::uint64_t parity_changes = 0;
  std::vector<std::uint64_t> visits;       ///< J_i for i < tracked (0 if unborn)
  std::vector<std::uint64_t> last_visits;  ///< last visit time, `never` if none
};

struct InvariantReport {
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  std::vector<std::string> messages;  ///< first few violations

  bool ok() const noexcept { return violations == 0; }
  void fail(std::string message);
};

struct RunStatistics {
  std::uint64_t step_parameter = 0;
  std::uint64_t target_nodes = 0;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  std::uint64_t parity_changes = 0;
  VisitLedger visits;
  DegreeHistogram degrees;
  DegreeHistogram structural_degrees;
  LeafFractionSeries leaves;
  DepthProfile depths;
  BounceRunLog bounces;
  std::vector<Checkpoint> checkpoints;
  InvariantReport invariants;
};

/// Streaming observer for a single run. Events must arrive in clock order.
class RunCollector {
 public:
  RunCollector(const SimConfig& config, StatisticsOptions options = {});

  void record(const StepEvent& event, const GrowingTree& tree, const WalkerState& walker);
  void operator()(const StepEvent& event, const GrowingTree& tree, const WalkerState& walker) {
    record(event, tree, walker);
  }

  const RunStatistics& current() const noexcept { return stats_; }

  /// Takes the degree/depth snapshots and returns the bundle.
  RunStatistics finish(const GrowingTree& tree, const WalkerState& walker) &&;

 private:
  void take_checkpoint(const GrowingTree& tree, const WalkerState& walker);
  void check_step(const StepEvent& event, const GrowingTree& tree, const WalkerState& walker);
  void check_snapshot(const GrowingTree& tree, const WalkerState& walker);

  SimConfig config_;
  StatisticsOptions options_;
  RunStatistics stats_;
  std::uint64_t last_time_ = 0;
  std::size_t next_checkpoint_ = 0;

  // bounce-run tracking
  bool bounce_open_ = false;
  Vertex bounce_anchor_ = 0;
  std::uint64_t bounce_degree_ = 0;
  std::uint64_t bounce_length_ = 0;

  // invariant monitor state
  std::uint8_t previous_parity_ = 0;
  int epoch_attach_parity_ = -1;
};

struct RunResult {
  GrowingTree tree{1};
  WalkerState walker;
  RunStatistics stats;
  std::vector<StepEvent> trajectory;
  double seconds = 0.0;
};

/// Executes s (N-1) steps and returns the final tree with the streaming
/// statistics. Deterministic in `config`.
RunResult run(const SimConfig& config, const StatisticsOptions& options = {});

struct RecurrenceReport {
  std::vector<Checkpoint> checkpoints;
  bool root_strictly_increasing = true;
  bool tracked_strictly_increasing = true;  ///< over vertices alive at both ends of an interval
  bool parity_strictly_increasing = true;
  std::vector<std::uint64_t> last_visits;  ///< at the final checkpoint
};

RecurrenceReport recurrence_probe(std::span<const Checkpoint> checkpoints);

// CSV serialization, stable column order.
void write_degrees_csv(std::ostream& out, const DegreeHistogram& histogram);
void write_ccdf_csv(std::ostream& out, const Ccdf& ccdf);
void write_leaves_csv(std::ostream& out, const LeafFractionSeries& series);
void write_visits_csv(std::ostream& out, const VisitLedger& ledger);
void write_bounces_csv(std::ostream& out, const BounceRunLog& log);

/// Writes degrees.csv, structural_degrees.csv, ccdf.csv, leaves.csv,
/// visits.csv and bounces.csv into `dir`.
void write_statistics(const std::filesystem::path& dir, const RunStatistics& stats);

}  // namespace nrrw
