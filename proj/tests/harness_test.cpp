#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nrrw/errors.hpp"
#include "nrrw/harness.hpp"

using namespace nrrw;
namespace fs = std::filesystem;

namespace {

std::string serialize(const RunStatistics& stats) {
  std::ostringstream out;
  write_degrees_csv(out, stats.degrees);
  write_leaves_csv(out, stats.leaves);
  write_visits_csv(out, stats.visits);
  write_bounces_csv(out, stats.bounces);
  return out.str();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nrrw-test-" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Spec, EmptyCellsIsConfigError) {
  ExperimentSpec spec;
  EXPECT_THROW(validate(spec), ConfigError);
  spec.cells.push_back({2, 100});
  EXPECT_NO_THROW(validate(spec));
  spec.replicas = 0;
  EXPECT_THROW(validate(spec), ConfigError);
  spec.replicas = 1;
  spec.checks = {"no-such-suite"};
  EXPECT_THROW(validate(spec), ConfigError);
  spec.checks.clear();
  spec.cells.push_back({0, 100});
  EXPECT_THROW(validate(spec), ConfigError);
}

TEST(Spec, JsonRoundTrip) {
  ExperimentSpec spec;
  spec.cells = {{1, 1000}, {2, 5000}};
  spec.replicas = 7;
  spec.base_seed = 99;
  spec.checks = {"dichotomy"};
  spec.output_dir = "out";
  spec.snapshot_grid = {10, 100};
  spec.jobs = 2;
  const ExperimentSpec back = spec_from_json(to_json(spec));
  EXPECT_EQ(back.cells, spec.cells);
  EXPECT_EQ(back.replicas, 7u);
  EXPECT_EQ(back.base_seed, 99u);
  EXPECT_EQ(back.checks, spec.checks);
  EXPECT_EQ(back.output_dir, spec.output_dir);
  EXPECT_EQ(back.snapshot_grid, spec.snapshot_grid);
  EXPECT_EQ(back.jobs, 2u);
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"cells":[{"nodes":3}]})")), ConfigError);
}

TEST(Seeds, AddingCellsDoesNotPerturbExistingReplicas) {
  EXPECT_EQ(replica_seed(1, 0, 0), replica_seed(1, 0, 0));
  EXPECT_NE(replica_seed(1, 0, 0), replica_seed(1, 1, 0));
  EXPECT_NE(replica_seed(1, 0, 0), replica_seed(1, 0, 1));
  EXPECT_NE(replica_seed(1, 0, 0), replica_seed(2, 0, 0));
}

TEST(Parallel, ResultsComeBackInIndexOrder) {
  const auto squares = parallel_map<std::uint64_t>(100, 4, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < squares.size(); ++i) EXPECT_EQ(squares[i], i * i);
  EXPECT_THROW(parallel_map<int>(10, 3,
                                 [](std::size_t i) -> int {
                                   if (i == 5) throw std::runtime_error("boom");
                                   return 0;
                                 }),
               std::runtime_error);
}

TEST(Replicas, ExecutionOrderAndJobsDoNotChangeResults) {
  const Cell cell{2, 3000};
  std::vector<std::uint64_t> reversed(6);
  std::iota(reversed.rbegin(), reversed.rend(), 0);
  const auto serial = run_replicas(cell, 0, 6, 5, {}, 1);
  const auto permuted = run_replicas(cell, 0, 6, 5, {}, 3, reversed);
  ASSERT_EQ(serial.size(), permuted.size());
  for (std::size_t r = 0; r < serial.size(); ++r) {
    EXPECT_EQ(serial[r].seed, permuted[r].seed);
    EXPECT_EQ(serialize(serial[r].stats), serialize(permuted[r].stats));
    EXPECT_TRUE(serial[r].ok());
    EXPECT_GT(serial[r].steps_per_second, 0.0);
  }
  const auto s1 = summarize(cell, serial);
  const auto s2 = summarize(cell, permuted);
  EXPECT_EQ(s1.degrees, s2.degrees);
  EXPECT_EQ(s1.bounces, s2.bounces);
  EXPECT_EQ(s1.mean_leaf_fraction, s2.mean_leaf_fraction);
}

TEST(Replicas, FailureIsReportedPerReplica) {
  // N = 0 is invalid; every replica fails without throwing out of the batch.
  const auto results = run_replicas({2, 0}, 0, 3, 1, {}, 1);
  for (const auto& r : results) EXPECT_FALSE(r.ok());
}

TEST(Experiment, ArtifactsAreByteIdenticalAcrossRuns) {
  ExperimentSpec spec;
  spec.cells = {{1, 2000}, {2, 2000}};
  spec.replicas = 3;
  spec.base_seed = 11;
  spec.checks = {"invariants"};
  spec.output_dir = scratch("a");
  const auto first = run_experiment(spec);
  const fs::path first_dir = spec.output_dir;
  spec.output_dir = scratch("b");
  spec.jobs = 2;
  const auto second = run_experiment(spec);
  ASSERT_EQ(first.suites.size(), 1u);
  EXPECT_EQ(first.suites.front().suite, "invariants");
  EXPECT_TRUE(first.pass());
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(first_dir)) {
    if (entry.path().extension() != ".csv") continue;
    const fs::path other = spec.output_dir / fs::relative(entry.path(), first_dir);
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path();
    ++compared;
  }
  EXPECT_GT(compared, 10u);
  EXPECT_TRUE(fs::exists(first_dir / "report.jsonl"));
  EXPECT_TRUE(fs::exists(first_dir / "report.txt"));
}

TEST(Verify, UnknownSuiteIsUsageErrorListingSuites) {
  try {
    verify("nope");
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    const std::string what = e.what();
    for (const auto& name : suite_names()) EXPECT_NE(what.find(name), std::string::npos) << name;
  }
}

TEST(Verify, OddStepIsRejectedBySuitesThatNeedEvenS) {
  SuiteParams p;
  p.step_parameter = 3;
  EXPECT_THROW(verify("leaf-fraction", p), UsageError);
  EXPECT_THROW(verify("bounce-back", p), UsageError);
}

TEST(Verify, ReportListsEachSuiteOnce) {
  SuiteParams p;
  VerificationReport report;
  report.suites.push_back(verify("expectation", p));
  p.step_parameter = 2;
  report.suites.push_back(verify("t-distribution", p));
  EXPECT_TRUE(report.pass());
  std::ostringstream jsonl;
  write_report_jsonl(jsonl, report);
  std::istringstream in(jsonl.str());
  std::string line;
  std::vector<std::string> suites;
  while (std::getline(in, line)) {
    const auto doc = nlohmann::json::parse(line);
    if (doc.contains("suite")) suites.push_back(doc["suite"]);
  }
  EXPECT_EQ(suites, (std::vector<std::string>{"expectation", "t-distribution"}));
}

TEST(Verify, SmallLeafFractionRun) {
  SuiteParams p;
  p.step_parameter = 4;
  p.nodes = 20000;
  p.replicas = 4;
  const SuiteResult r = verify("leaf-fraction", p);
  ASSERT_NE(r.find("mean-final-above-bound"), nullptr);
  EXPECT_TRUE(r.find("mean-final-above-bound")->pass);
  EXPECT_TRUE(r.find("every-replica-above-two-thirds")->pass);
}
