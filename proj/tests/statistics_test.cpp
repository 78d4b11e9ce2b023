#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "nrrw/errors.hpp"
#include "nrrw/oracles.hpp"
#include "nrrw/statistics.hpp"

using namespace nrrw;

TEST(Grid, LogGridEndsAtHiAndIsSorted) {
  const auto grid = log_grid(2, 1000, 20);
  EXPECT_EQ(grid.front(), 2u);
  EXPECT_EQ(grid.back(), 1000u);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  EXPECT_EQ(std::adjacent_find(grid.begin(), grid.end()), grid.end());
  EXPECT_EQ(default_checkpoints(200000).size(), 10u);
}

TEST(Collector, OutOfOrderEventIsProtocolError) {
  SimConfig config{2, 10, 1};
  Simulation sim(config);
  RunCollector collector(config);
  const StepEvent first = sim.step();
  collector.record(first, sim.tree(), sim.walker());
  EXPECT_THROW(collector.record(first, sim.tree(), sim.walker()), ProtocolError);
}

TEST(Collector, TwoVertexRun) {
  const RunResult r = run(SimConfig{2, 2, 4});
  EXPECT_GE(r.stats.visits.visits(0), 2u);
  EXPECT_EQ(r.stats.visits.first_attachment(0), 2u);
  EXPECT_EQ(r.stats.leaves.leaves(), 1u);
  EXPECT_DOUBLE_EQ(leaf_fraction(r.stats.leaves).final_fraction, 0.5);
}

TEST(Collector, FirstAttachmentToRootIsAtTimeS) {
  for (std::uint64_t s : {1, 2, 3, 5}) {
    const RunResult r = run(SimConfig{s, 50, 8});
    EXPECT_EQ(r.stats.visits.first_attachment(0), s);
  }
}

TEST(Collector, LedgerConservesVisits) {
  const RunResult r = run(SimConfig{3, 2000, 2});
  EXPECT_EQ(r.stats.visits.total_visits(), r.walker.clock);
  EXPECT_EQ(r.stats.degrees.total(), 2000u);
}

TEST(Collector, InvariantMonitorCleanOnSeveralConfigs) {
  StatisticsOptions options;
  options.monitor_invariants = true;
  for (std::uint64_t s : {1, 2, 3, 4, 6}) {
    const RunResult r = run(SimConfig{s, 1500, 17 + s}, options);
    EXPECT_TRUE(r.stats.invariants.ok())
        << "s=" << s << ": "
        << (r.stats.invariants.messages.empty() ? "" : r.stats.invariants.messages.front());
    EXPECT_GT(r.stats.invariants.checks, 0u);
  }
}

TEST(Collector, CheckpointsRecordRootVisits) {
  StatisticsOptions options;
  options.checkpoints = {10, 100, 1000};
  const RunResult r = run(SimConfig{2, 1000, 3}, options);
  ASSERT_EQ(r.stats.checkpoints.size(), 3u);
  EXPECT_EQ(r.stats.checkpoints[1].time, 100u);
  EXPECT_LE(r.stats.checkpoints[0].visits[0], r.stats.checkpoints[2].visits[0]);
  const auto rep = recurrence_probe(r.stats.checkpoints);
  EXPECT_EQ(rep.checkpoints.size(), 3u);
}

TEST(Histogram, CcdfRoundTrip) {
  const std::vector<std::uint64_t> samples{1, 1, 1, 2, 3, 3, 7, 7, 7, 12};
  const auto h = DegreeHistogram::from_samples(samples);
  const Ccdf ccdf = empirical_ccdf(h, CcdfCondition::all);
  EXPECT_DOUBLE_EQ(ccdf.at(1), 1.0);
  EXPECT_DOUBLE_EQ(ccdf.at(4), 0.4);
  for (std::size_t i = 1; i < ccdf.points.size(); ++i) {
    EXPECT_LE(ccdf.points[i].p, ccdf.points[i - 1].p);
  }
  EXPECT_EQ(histogram_from_ccdf(ccdf), h);
}

TEST(Histogram, NonLeafConditioning) {
  // a star: every vertex but the centre is a leaf
  DegreeHistogram h;
  h.add(1, 9);
  h.add(11);
  const Ccdf non_leaf = empirical_ccdf(h, CcdfCondition::non_leaf);
  EXPECT_DOUBLE_EQ(non_leaf.at(11), 1.0);
  EXPECT_DOUBLE_EQ(non_leaf.at(12), 0.0);
  EXPECT_EQ(*non_leaf.sample_size, 1u);
}

TEST(Histogram, EmptyIsStateError) {
  EXPECT_THROW(empirical_ccdf(DegreeHistogram{}, CcdfCondition::all), StateError);
}

TEST(Histogram, MergeIsCommutative) {
  auto a = DegreeHistogram::from_samples(std::vector<std::uint64_t>{1, 2, 2, 5});
  auto b = DegreeHistogram::from_samples(std::vector<std::uint64_t>{3, 9});
  auto ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  EXPECT_EQ(ab, ba);
  EXPECT_EQ(ab.total(), 6u);
}

TEST(TailFit, ExactPowerLaw) {
  const Ccdf ccdf = Ccdf::analytic(1, 100, [](std::uint64_t k) { return 1.0 / double(k); });
  const TailFit fit = tail_exponent_fit(ccdf, 1, 100);
  EXPECT_NEAR(fit.slope, -1.0, 1e-9);
  EXPECT_FALSE(fit.nonlinear);
}

TEST(TailFit, GeometricIsFlaggedNonlinear) {
  const Ccdf ccdf = Ccdf::analytic(2, 20, [](std::uint64_t k) { return std::pow(2.0 / 3.0, double(k)); });
  const TailFit fit = tail_exponent_fit(ccdf, 2, 20);
  EXPECT_TRUE(fit.nonlinear);
  EXPECT_NEAR(fit.r_squared, 0.9148354568, 1e-9);
  EXPECT_NEAR(fit.slope, -3.3082613, 1e-6);
}

TEST(TailFit, InsufficientSupportCarriesUsableRange) {
  DegreeHistogram h;
  for (std::uint64_t d = 1; d <= 30; ++d) h.add(d, d < 4 ? 100 : 1);
  const Ccdf ccdf = empirical_ccdf(h, CcdfCondition::all);
  try {
    tail_exponent_fit(ccdf, 2, 30);
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_LE(e.usable_min(), e.usable_max());
  }
}

TEST(TailFit, StarProcessSlope) {
  PrngStream rng(12, 0);
  DegreeHistogram h;
  for (int i = 0; i < 100000; ++i) {
    h.add(oracle::simulate_star({2, oracle::StarVariant::non_root}, rng).center_degree - 1);
  }
  const Ccdf ccdf = sample_ccdf(h);
  const auto [lo, hi] = default_fit_range(ccdf);
  const TailFit fit = tail_exponent_fit(ccdf, lo, hi);
  EXPECT_NEAR(fit.slope, -1.0, 0.1);
}

TEST(Dominance, ExactBoundPasses) {
  const Ccdf ccdf = Ccdf::analytic(1, 10, [](std::uint64_t k) { return 1.0 / double(k); });
  const auto rep = dominance_check(ccdf, [](std::uint64_t k) { return 1.0 / double(k); },
                                   Direction::at_most, 1000, 0.01);
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(rep.margin, std::sqrt(std::log(200.0) / 2000.0), 1e-15);
  const auto below = dominance_check(ccdf, [](std::uint64_t k) { return 1.0 / double(k); },
                                     Direction::at_least, 1000, 0.01);
  EXPECT_TRUE(below.pass);
}

TEST(Dominance, ViolationIsReported) {
  const Ccdf ccdf = Ccdf::analytic(1, 10, [](std::uint64_t) { return 0.9; });
  const auto rep = dominance_check(ccdf, [](std::uint64_t k) { return 1.0 / double(k); },
                                   Direction::at_most, 10000, 0.01);
  EXPECT_FALSE(rep.pass);
  EXPECT_EQ(rep.worst_k, 10u);
}

TEST(LeafSeries, RenewalGapsSkipOpenInterval) {
  LeafFractionSeries series;
  series.on_attachment(false, 2, 2);  // root gains a child: leaves 0 -> 1
  series.on_attachment(true, 3, 4);   // a leaf becomes internal: renewal
  series.on_attachment(false, 4, 6);
  series.on_attachment(true, 5, 8);   // renewal
  series.on_attachment(true, 6, 14);  // renewal
  EXPECT_EQ(series.renewal_marks().size(), 3u);
  EXPECT_EQ(renewal_gaps(series), (std::vector<std::uint64_t>{4, 6}));
  EXPECT_TRUE(series.monotone());
}

TEST(Bounces, MergeMatchesPooledAdds) {
  BounceRunLog a, b, pooled;
  a.add(3, 0, 2);
  b.add(3, 1);
  b.add(5, 4);
  pooled.add(3, 0, 2);
  pooled.add(3, 1);
  pooled.add(5, 4);
  a.merge(b);
  EXPECT_EQ(a, pooled);
  EXPECT_EQ(a.total_runs(), 4u);
}

TEST(Csv, StableHeaders) {
  const RunResult r = run(SimConfig{2, 200, 1});
  std::ostringstream deg, ccdf, leaves, visits, bounces;
  write_degrees_csv(deg, r.stats.degrees);
  write_ccdf_csv(ccdf, empirical_ccdf(r.stats.degrees, CcdfCondition::all));
  write_leaves_csv(leaves, r.stats.leaves);
  write_visits_csv(visits, r.stats.visits);
  write_bounces_csv(bounces, r.stats.bounces);
  EXPECT_EQ(deg.str().substr(0, 13), "degree,count\n");
  EXPECT_EQ(ccdf.str().substr(0, 4), "k,p\n");
  EXPECT_EQ(leaves.str().substr(0, 9), "n,leaves\n");
  EXPECT_EQ(visits.str().substr(0, 38), "vertex,count,first_visit,first_attach\n");
  EXPECT_EQ(bounces.str().substr(0, 24), "start_degree,run_length\n");

  // the p column of ccdf.csv never increases
  std::istringstream in(ccdf.str());
  std::string line;
  std::getline(in, line);
  double previous = 2.0;
  while (std::getline(in, line)) {
    const double p = std::stod(line.substr(line.find(',') + 1));
    EXPECT_LE(p, previous);
    previous = p;
  }
}
