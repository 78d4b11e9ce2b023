// Acceptance criteria AC1..AC10. Prints one PASS/FAIL line per criterion,
// followed by the suite detail. Usage: acceptance [criterion ...]; no
// arguments runs all ten.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "nrrw/harness.hpp"

using namespace nrrw;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::string suite;
  SuiteParams params;
  double time_limit;  // seconds
};

SuiteParams with_s(std::uint64_t s) {
  SuiteParams p;
  p.step_parameter = s;
  return p;
}

std::vector<Criterion> criteria() {
  return {
      {1, "star tails: exhaustive enumeration and Monte Carlo", "star-tail", {}, 60},
      {2, "T distribution: exact telescoping and total variation", "t-distribution", {}, 60},
      {3, "E(T) = 1 + 2 zeta(s/2); divergence for s = 2", "expectation", {}, 60},
      {4, "leaf fraction s=4 above 1 - 1/E(T) - 0.02", "leaf-fraction", with_s(4), 120},
      {5, "leaf fraction s=2 increasing and above 0.90", "leaf-fraction", with_s(2), 300},
      {6, "s=1 root visits geometrically dominated; early last visit", "geometric-visits", {}, 300},
      {7, "s in {2,4} root visits and parity changes keep growing", "recurrence", {}, 120},
      {8, "bounce-back runs below the product bound", "bounce-back", {}, 120},
      {9, "structural invariants and deterministic replay", "invariants", {}, 30},
      {10, "max-depth dichotomy s=1 vs s=2", "dichotomy", {}, 600},
  };
}

bool run_one(const Criterion& c) {
  const SuiteResult result = verify(c.suite, c.params);
  const bool in_time = result.seconds < c.time_limit;
  const bool pass = result.pass() && in_time;
  std::cout << "AC" << c.id << ' ' << (pass ? "PASS" : "FAIL") << "  " << c.title << "  ("
            << std::fixed << std::setprecision(1) << result.seconds << " s, limit "
            << c.time_limit << " s)" << std::defaultfloat << '\n';
  VerificationReport report;
  report.suites.push_back(result);
  report.seconds = result.seconds;
  write_report_text(std::cout, report);
  if (!in_time) std::cout << "  runtime limit exceeded\n";
  std::cout.flush();
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  const auto all = criteria();
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  if (wanted.empty()) {
    for (const auto& c : all) wanted.push_back(c.id);
  }
  bool ok = true;
  for (int id : wanted) {
    if (id < 1 || id > static_cast<int>(all.size())) {
      std::cerr << "unknown criterion " << id << '\n';
      return 2;
    }
    ok = run_one(all[id - 1]) && ok;
  }
  return ok ? 0 : 1;
}
