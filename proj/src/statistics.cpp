#include "nrrw/statistics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nrrw/errors.hpp"

namespace nrrw {

std::vector<std::uint64_t> log_grid(std::uint64_t lo, std::uint64_t hi, std::size_t points) {
  std::vector<std::uint64_t> grid;
  if (hi == 0 || points == 0) return grid;
  lo = std::clamp<std::uint64_t>(lo, 1, hi);
  if (points == 1 || lo == hi) return {hi};
  const double log_lo = std::log(static_cast<double>(lo));
  const double log_hi = std::log(static_cast<double>(hi));
  for (std::size_t i = 0; i < points; ++i) {
    const double x = log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                  static_cast<double>(points - 1);
    auto value = static_cast<std::uint64_t>(std::llround(std::exp(x)));
    value = std::clamp(value, lo, hi);
    if (grid.empty() || value > grid.back()) grid.push_back(value);
  }
  if (grid.back() != hi) grid.push_back(hi);
  return grid;
}

std::vector<std::uint64_t> default_leaf_grid(std::uint64_t target_nodes) {
  if (target_nodes < 2) return {};
  return log_grid(2, target_nodes, 20);
}

std::vector<std::uint64_t> default_checkpoints(std::uint64_t total_steps) {
  if (total_steps == 0) return {};
  return log_grid(1, total_steps, 10);
}

// ---------------------------------------------------------------------------
// VisitLedger

void VisitLedger::reserve(std::uint64_t vertices) {
  visits_.reserve(vertices);
  first_visit_.reserve(vertices);
  last_visit_.reserve(vertices);
  first_attachment_.reserve(vertices);
}

void VisitLedger::add_vertex() {
  visits_.push_back(0);
  first_visit_.push_back(never);
  last_visit_.push_back(never);
  first_attachment_.push_back(never);
}

std::uint64_t VisitLedger::max_visits() const noexcept {
  return visits_.empty() ? 0 : *std::max_element(visits_.begin(), visits_.end());
}

// ---------------------------------------------------------------------------
// DegreeHistogram / CCDF

DegreeHistogram DegreeHistogram::from_tree(const GrowingTree& tree, bool structural) {
  DegreeHistogram h;
  for (Vertex v = 0; v < tree.vertex_count(); ++v) {
    h.add(structural ? tree.structural_degree(v) : tree.degree_unchecked(v));
  }
  return h;
}

DegreeHistogram DegreeHistogram::from_samples(std::span<const std::uint64_t> samples) {
  DegreeHistogram h;
  for (std::uint64_t x : samples) h.add(x);
  return h;
}

void DegreeHistogram::add(std::uint64_t value, std::uint64_t count) {
  if (value >= counts.size()) counts.resize(value + 1, 0);
  counts[value] += count;
}

void DegreeHistogram::merge(const DegreeHistogram& other) {
  if (other.counts.size() > counts.size()) counts.resize(other.counts.size(), 0);
  for (std::size_t d = 0; d < other.counts.size(); ++d) counts[d] += other.counts[d];
}

std::uint64_t DegreeHistogram::total() const noexcept {
  std::uint64_t sum = 0;
  for (std::uint64_t c : counts) sum += c;
  return sum;
}

Ccdf Ccdf::analytic(std::uint64_t k_min, std::uint64_t k_max,
                    const std::function<double(std::uint64_t)>& tail) {
  Ccdf c;
  for (std::uint64_t k = k_min; k <= k_max; ++k) c.points.push_back({k, 0, tail(k)});
  return c;
}

double Ccdf::at(std::uint64_t k) const {
  if (points.empty()) throw StateError("empty CCDF");
  if (k < points.front().k) return 1.0;
  if (k > points.back().k) return 0.0;
  return points[k - points.front().k].p;
}

namespace {

Ccdf ccdf_from(const DegreeHistogram& histogram, std::uint64_t first_k) {
  std::uint64_t n = 0;
  for (std::size_t d = first_k; d < histogram.counts.size(); ++d) n += histogram.counts[d];
  if (n == 0) throw StateError("empty histogram");
  Ccdf c;
  c.sample_size = n;
  std::uint64_t at_least = n;
  for (std::size_t k = first_k; k < histogram.counts.size(); ++k) {
    c.points.push_back({k, at_least, static_cast<double>(at_least) / static_cast<double>(n)});
    at_least -= histogram.counts[k];
  }
  return c;
}

}  // namespace

Ccdf empirical_ccdf(const DegreeHistogram& histogram, CcdfCondition condition) {
  return ccdf_from(histogram, condition == CcdfCondition::all ? 1 : 2);
}

Ccdf sample_ccdf(const DegreeHistogram& histogram) { return ccdf_from(histogram, 0); }

DegreeHistogram histogram_from_ccdf(const Ccdf& ccdf) {
  DegreeHistogram h;
  for (std::size_t i = 0; i < ccdf.points.size(); ++i) {
    const std::uint64_t next = i + 1 < ccdf.points.size() ? ccdf.points[i + 1].at_least : 0;
    h.add(ccdf.points[i].k, ccdf.points[i].at_least - next);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Tail fit

std::pair<std::uint64_t, std::uint64_t> default_fit_range(const Ccdf& ccdf,
                                                          std::uint64_t min_support) {
  std::uint64_t k_max = 0;
  for (const CcdfPoint& point : ccdf.points) {
    const bool supported = !ccdf.sample_size || point.at_least >= min_support;
    if (supported && point.p > 0.0) k_max = std::max(k_max, point.k);
  }
  return {2, k_max};
}

constexpr std::size_t kFitPoints = 50;

TailFit tail_exponent_fit(const Ccdf& ccdf, std::uint64_t k_min, std::uint64_t k_max,
                          std::uint64_t min_support) {
  // At most 50 log-spaced abscissae (every integer on short ranges), so the
  // many sparse tail points do not dominate the regression.
  const std::vector<std::uint64_t> grid =
      k_max >= std::max<std::uint64_t>(k_min, 1) ? log_grid(std::max<std::uint64_t>(k_min, 1), k_max, kFitPoints)
                                                 : std::vector<std::uint64_t>{};
  std::vector<double> xs;
  std::vector<double> ys;
  std::uint64_t usable_min = never;
  std::uint64_t usable_max = 0;
  for (const CcdfPoint& point : ccdf.points) {
    const bool supported = !ccdf.sample_size || point.at_least >= min_support;
    if (!supported || point.p <= 0.0) continue;
    usable_min = std::min(usable_min, point.k);
    usable_max = std::max(usable_max, point.k);
    if (!std::binary_search(grid.begin(), grid.end(), point.k)) continue;
    xs.push_back(std::log(static_cast<double>(point.k)));
    ys.push_back(std::log(point.p));
  }
  if (xs.size() < 5) {
    throw FitError("tail fit needs 5 supported points in [" + std::to_string(k_min) + ", " +
                       std::to_string(k_max) + "], found " + std::to_string(xs.size()),
                   usable_min == never ? 0 : usable_min, usable_max);
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  TailFit fit;
  fit.points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    sse += r * r;
  }
  fit.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.nonlinear = fit.r_squared < 0.99;
  return fit;
}

// ---------------------------------------------------------------------------
// Dominance

double concentration_margin(std::uint64_t n_samples, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (n_samples == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n_samples)));
}

DominanceReport dominance_check(const Ccdf& empirical,
                                const std::function<double(std::uint64_t)>& bound,
                                Direction direction, std::uint64_t n_samples, double alpha) {
  DominanceReport report;
  report.margin = concentration_margin(n_samples, alpha);
  for (const CcdfPoint& point : empirical.points) {
    DominancePoint dp;
    dp.k = point.k;
    dp.empirical = point.p;
    dp.bound = bound(point.k);
    dp.excess = direction == Direction::at_most ? dp.empirical - dp.bound : dp.bound - dp.empirical;
    dp.pass = dp.excess <= report.margin;
    if (dp.excess > report.worst_excess) {
      report.worst_excess = dp.excess;
      report.worst_k = dp.k;
    }
    report.pass = report.pass && dp.pass;
    report.points.push_back(dp);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Leaf fraction

LeafFractionSeries::LeafFractionSeries(std::vector<std::uint64_t> grid) : grid_(std::move(grid)) {
  std::sort(grid_.begin(), grid_.end());
  grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());
  while (next_grid_ < grid_.size() && grid_[next_grid_] < 1) ++next_grid_;
  if (next_grid_ < grid_.size() && grid_[next_grid_] == 1) {
    samples_.emplace_back(1, 0);
    ++next_grid_;
  }
}

void LeafFractionSeries::on_attachment(bool target_was_leaf, std::uint64_t vertex_count,
                                       std::uint64_t time) {
  const std::uint64_t before = leaves_;
  if (target_was_leaf) {
    renewals_.push_back(time);
  } else {
    ++leaves_;
  }
  monotone_ = monotone_ && leaves_ >= before && leaves_ <= vertex_count;
  vertex_count_ = vertex_count;
  while (next_grid_ < grid_.size() && grid_[next_grid_] <= vertex_count) {
    if (grid_[next_grid_] == vertex_count) samples_.emplace_back(vertex_count, leaves_);
    ++next_grid_;
  }
}

LeafFraction leaf_fraction(const LeafFractionSeries& series) {
  LeafFraction result;
  result.final_fraction =
      static_cast<double>(series.leaves()) / static_cast<double>(series.vertex_count());
  for (const auto& [n, leaves] : series.samples()) {
    result.trajectory.emplace_back(n, static_cast<double>(leaves) / static_cast<double>(n));
  }
  return result;
}

std::vector<std::uint64_t> renewal_gaps(const LeafFractionSeries& series) {
  const auto& marks = series.renewal_marks();
  std::vector<std::uint64_t> gaps;
  for (std::size_t l = 1; l < marks.size(); ++l) gaps.push_back(marks[l] - marks[l - 1]);
  return gaps;
}

DepthProfile DepthProfile::from_tree(const GrowingTree& tree) {
  DepthProfile profile;
  for (Vertex v = 0; v < tree.vertex_count(); ++v) profile.depths.add(tree.depth_unchecked(v));
  profile.max_depth = tree.max_depth();
  return profile;
}

// ---------------------------------------------------------------------------
// Bounce runs

void BounceRunLog::add(std::uint64_t start_degree, std::uint64_t run_length, std::uint64_t count) {
  runs_[start_degree].add(run_length, count);
}

void BounceRunLog::merge(const BounceRunLog& other) {
  for (const auto& [degree, histogram] : other.runs_) runs_[degree].merge(histogram);
}

std::uint64_t BounceRunLog::total_runs() const noexcept {
  std::uint64_t total = 0;
  for (const auto& [degree, histogram] : runs_) total += histogram.total();
  return total;
}

// ---------------------------------------------------------------------------
// Collector

void InvariantReport::fail(std::string message) {
  ++violations;
  if (messages.size() < 8) messages.push_back(std::move(message));
}

RunCollector::RunCollector(const SimConfig& config, StatisticsOptions options)
    : config_(config), options_(std::move(options)) {
  validate(config_);
  if (options_.leaf_grid.empty()) options_.leaf_grid = default_leaf_grid(config_.target_nodes);
  if (options_.checkpoints.empty()) {
    options_.checkpoints = default_checkpoints(config_.total_steps());
  }
  std::sort(options_.checkpoints.begin(), options_.checkpoints.end());
  options_.checkpoints.erase(std::unique(options_.checkpoints.begin(), options_.checkpoints.end()),
                             options_.checkpoints.end());
  stats_.step_parameter = config_.step_parameter;
  stats_.target_nodes = config_.target_nodes;
  stats_.seed = config_.seed;
  stats_.visits.reserve(config_.target_nodes);
  stats_.leaves = LeafFractionSeries(options_.leaf_grid);
  if (options_.record_depth_trace) stats_.depths.walker_trace.reserve(config_.total_steps());
  while (next_checkpoint_ < options_.checkpoints.size() &&
         options_.checkpoints[next_checkpoint_] == 0) {
    ++next_checkpoint_;
  }
}

void RunCollector::record(const StepEvent& event, const GrowingTree& tree,
                          const WalkerState& walker) {
  if (event.time != last_time_ + 1) {
    throw ProtocolError("event at t=" + std::to_string(event.time) + " after t=" +
                        std::to_string(last_time_));
  }
  last_time_ = event.time;
  const std::uint64_t t = event.time;

  stats_.visits.record_visit(event.to, t);

  if (event.attached_vertex) {
    stats_.visits.add_vertex();
    stats_.visits.record_attachment(event.to, t);
    const bool was_leaf =
        event.to != GrowingTree::root && tree.degree_unchecked(event.to) == 2;
    stats_.leaves.on_attachment(was_leaf, tree.vertex_count(), t);
  }

  if (options_.record_depth_trace) {
    stats_.depths.walker_trace.push_back(tree.depth_unchecked(event.to));
  }

  // Two-step return runs, anchored at even times t0 >= s.
  if (t % 2 == 0 && t >= config_.step_parameter) {
    if (bounce_open_ && event.to == bounce_anchor_) {
      ++bounce_length_;
    } else {
      if (bounce_open_) stats_.bounces.add(bounce_degree_, bounce_length_);
      bounce_open_ = true;
      bounce_anchor_ = event.to;
      bounce_degree_ = tree.degree_unchecked(event.to);
      bounce_length_ = 0;
    }
  }

  if (options_.monitor_invariants) check_step(event, tree, walker);

  while (next_checkpoint_ < options_.checkpoints.size() &&
         options_.checkpoints[next_checkpoint_] <= t) {
    if (options_.checkpoints[next_checkpoint_] == t) take_checkpoint(tree, walker);
    ++next_checkpoint_;
  }
}

void RunCollector::take_checkpoint(const GrowingTree& tree, const WalkerState& walker) {
  Checkpoint cp;
  cp.time = walker.clock;
  cp.vertex_count = tree.vertex_count();
  cp.parity_changes = walker.parity_change_count;
  const std::uint64_t m = options_.tracked_vertices;
  cp.visits.assign(m, 0);
  cp.last_visits.assign(m, never);
  for (Vertex v = 0; v < m && v < stats_.visits.size(); ++v) {
    cp.visits[v] = stats_.visits.visits(v);
    cp.last_visits[v] = stats_.visits.last_visit(v);
  }
  stats_.checkpoints.push_back(std::move(cp));
  if (options_.monitor_invariants) check_snapshot(tree, walker);
}

void RunCollector::check_step(const StepEvent& event, const GrowingTree& tree,
                              const WalkerState& walker) {
  InvariantReport& inv = stats_.invariants;
  const std::string at = " at t=" + std::to_string(event.time);
  ++inv.checks;

  const auto recomputed =
      static_cast<std::uint8_t>((tree.depth_unchecked(walker.position) + walker.clock) % 2);
  if (recomputed != walker.parity) inv.fail("tracked parity differs from recomputed" + at);
  if ((walker.parity != previous_parity_) != event.via_self_loop) {
    inv.fail("parity flip without self-loop (or loop without flip)" + at);
  }
  if (walker.parity_change_count % 2 != walker.parity) {
    inv.fail("parity disagrees with parity_change_count" + at);
  }
  if (event.via_self_loop && (event.from != GrowingTree::root || event.to != GrowingTree::root)) {
    inv.fail("self-loop traversal away from the root" + at);
  }
  previous_parity_ = walker.parity;

  if (event.via_self_loop) epoch_attach_parity_ = -1;
  if (event.attached_vertex) {
    const Vertex child = *event.attached_vertex;
    if (tree.parent_unchecked(child) != event.to) inv.fail("attached vertex not under walker" + at);
    if (child != tree.vertex_count() - 1) inv.fail("attached label out of sequence" + at);
    if (tree.depth_unchecked(child) != tree.depth_unchecked(event.to) + 1) {
      inv.fail("depth of new vertex is not parent depth + 1" + at);
    }
    if (child * config_.step_parameter != event.time) inv.fail("birth time is not j*s" + at);
    if (config_.step_parameter % 2 == 0) {
      const int depth_parity = static_cast<int>(tree.depth_unchecked(event.to) % 2);
      if (epoch_attach_parity_ >= 0 && depth_parity != epoch_attach_parity_) {
        inv.fail("attachment depths changed parity without a self-loop traversal" + at);
      }
      epoch_attach_parity_ = depth_parity;
      if (depth_parity != walker.parity) inv.fail("attachment depth parity != walker parity" + at);
    }
    if (tree.vertex_count() >= 2 && tree.degree_unchecked(GrowingTree::root) < 3) {
      inv.fail("root degree below 3 after first attachment" + at);
    }
  }
  if (!stats_.leaves.monotone()) inv.fail("leaf count decreased" + at);
}

void RunCollector::check_snapshot(const GrowingTree& tree, const WalkerState& walker) {
  InvariantReport& inv = stats_.invariants;
  const std::string at = " at t=" + std::to_string(walker.clock);
  ++inv.checks;
  std::uint64_t degree_sum = 0;
  std::uint64_t leaves = 0;
  for (Vertex v = 0; v < tree.vertex_count(); ++v) {
    const std::uint64_t d = tree.degree_unchecked(v);
    degree_sum += d;
    if (v != GrowingTree::root && d == 1) ++leaves;
    if (v != GrowingTree::root && tree.parent_unchecked(v) >= v) inv.fail("parent label >= child" + at);
  }
  const std::uint64_t n = tree.vertex_count();
  if (degree_sum != 2 * (n - 1) + 2) inv.fail("degree sum != 2(n-1)+2" + at);
  if (leaves != stats_.leaves.leaves()) inv.fail("incremental leaf count drifted" + at);
  // non-root non-leaf count N_n satisfies N_n + 1 = n - L_n
  const std::uint64_t non_root_non_leaf = n - 1 - leaves;
  if (non_root_non_leaf + 1 != n - stats_.leaves.leaves()) inv.fail("N_n + 1 != n - L_n" + at);
  if (stats_.visits.total_visits() != walker.clock) inv.fail("sum of J_i != clock" + at);
}

RunStatistics RunCollector::finish(const GrowingTree& tree, const WalkerState& walker) && {
  if (options_.monitor_invariants) check_snapshot(tree, walker);
  stats_.steps = walker.clock;
  stats_.parity_changes = walker.parity_change_count;
  stats_.degrees = DegreeHistogram::from_tree(tree);
  stats_.structural_degrees = DegreeHistogram::from_tree(tree, true);
  auto trace = std::move(stats_.depths.walker_trace);
  stats_.depths = DepthProfile::from_tree(tree);
  stats_.depths.walker_trace = std::move(trace);
  return std::move(stats_);
}

RunResult run(const SimConfig& config, const StatisticsOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Simulation sim(config);
  RunCollector collector(config, options);
  sim.run(collector);
  RunResult result;
  result.walker = sim.walker();
  result.trajectory = sim.trajectory();
  result.stats = std::move(collector).finish(sim.tree(), sim.walker());
  result.tree = std::move(sim).release_tree();
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// Recurrence

RecurrenceReport recurrence_probe(std::span<const Checkpoint> checkpoints) {
  RecurrenceReport report;
  report.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    const Checkpoint& a = checkpoints[i - 1];
    const Checkpoint& b = checkpoints[i];
    if (b.time <= a.time) throw DomainError("checkpoints must be increasing");
    if (b.visits.empty() || b.visits[0] <= a.visits[0]) report.root_strictly_increasing = false;
    if (b.parity_changes <= a.parity_changes) report.parity_strictly_increasing = false;
    for (std::size_t v = 0; v < a.visits.size() && v < b.visits.size(); ++v) {
      if (v < a.vertex_count && b.visits[v] <= a.visits[v]) {
        report.tracked_strictly_increasing = false;
      }
    }
  }
  if (!checkpoints.empty()) report.last_visits = checkpoints.back().last_visits;
  return report;
}

// ---------------------------------------------------------------------------
// CSV

void write_degrees_csv(std::ostream& out, const DegreeHistogram& histogram) {
  out << "degree,count\n";
  for (std::size_t d = 0; d < histogram.counts.size(); ++d) {
    if (histogram.counts[d] > 0) out << d << ',' << histogram.counts[d] << '\n';
  }
}

void write_ccdf_csv(std::ostream& out, const Ccdf& ccdf) {
  out << "k,p\n";
  std::ostringstream line;
  line.precision(17);
  for (const CcdfPoint& point : ccdf.points) line << point.k << ',' << point.p << '\n';
  out << line.str();
}

void write_leaves_csv(std::ostream& out, const LeafFractionSeries& series) {
  out << "n,leaves\n";
  for (const auto& [n, leaves] : series.samples()) out << n << ',' << leaves << '\n';
}

namespace {

void write_time(std::ostream& out, std::uint64_t t) {
  if (t != never) out << t;
}

}  // namespace

void write_visits_csv(std::ostream& out, const VisitLedger& ledger) {
  out << "vertex,count,first_visit,first_attach\n";
  for (Vertex v = 0; v < ledger.size(); ++v) {
    out << v << ',' << ledger.visits(v) << ',';
    write_time(out, ledger.first_visit(v));
    out << ',';
    write_time(out, ledger.first_attachment(v));
    out << '\n';
  }
}

void write_bounces_csv(std::ostream& out, const BounceRunLog& log) {
  out << "start_degree,run_length\n";
  for (const auto& [degree, histogram] : log.by_degree()) {
    for (std::size_t len = 0; len < histogram.counts.size(); ++len) {
      for (std::uint64_t i = 0; i < histogram.counts[len]; ++i) {
        out << degree << ',' << len << '\n';
      }
    }
  }
}

void write_statistics(const std::filesystem::path& dir, const RunStatistics& stats) {
  std::filesystem::create_directories(dir);
  auto open = [&dir](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("degrees.csv");
    write_degrees_csv(out, stats.degrees);
  }
  {
    auto out = open("structural_degrees.csv");
    write_degrees_csv(out, stats.structural_degrees);
  }
  if (!stats.degrees.empty()) {
    auto out = open("ccdf.csv");
    write_ccdf_csv(out, empirical_ccdf(stats.degrees, CcdfCondition::all));
  }
  {
    auto out = open("leaves.csv");
    write_leaves_csv(out, stats.leaves);
  }
  {
    auto out = open("visits.csv");
    write_visits_csv(out, stats.visits);
  }
  {
    auto out = open("bounces.csv");
    write_bounces_csv(out, stats.bounces);
  }
}

}  // namespace nrrw
