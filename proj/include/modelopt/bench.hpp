#pragma once

#include <string>
#include <vector>

#include "modelopt/problems.hpp"
#include "modelopt/solvers.hpp"

namespace modelopt {

struct RunRequest {
  Method method = Method::GM;
  SolverConfig config;
  /// Fixed L for gm-rel and sfgm; defaults to the problem's true L.
  std::optional<double> L_fixed;
  /// sfgm on a problem with a sampler draws mini-batches of this size.
  std::size_t batch = 1;
  /// R^2 for the bound; defaults to the problem's (post hoc for primal-dual).
  std::optional<double> r2;
};

struct RunReport {
  std::string problem;
  Method method = Method::GM;
  RunTrace trace;
  double f_star = 0.0;
  double f_star_error = 0.0;
  /// Per iteration: f(x-bar) - f_* (gm, gm-rel), f(x_k) - f_* (fgm family),
  /// f(out) + g(z-bar) (primal-dual).
  std::vector<double> gap;
  std::vector<double> gap_bound;    // empty when no theorem applies
  std::vector<double> duality_gap;  // primal-dual only
  std::optional<BoundReport> bound;
  double r2 = 0.0;
  double final_gap = 0.0;
  double final_bound = std::numeric_limits<double>::quiet_NaN();
  /// Whether the bound is asserted (deterministic oracle and a theorem).
  bool asserted = false;
  bool passed = true;
  std::string note;
};

/// Runs one (problem, solver) pair, reports gaps and checks them against the
/// matching theorem at every iteration.
RunReport run_benchmark(const ProblemInstance& problem, const RunRequest& request);

struct SuiteEntry {
  std::string problem;
  ProblemParams params;
  RunRequest request;
  /// One run per seed; empty means a single run with the request's seed.
  std::vector<std::uint64_t> seeds;
  /// Trace path; derived from problem and solver when empty.
  std::string out;
};

/// Every (problem, solver) pairing the suite exercises with exact models.
std::vector<SuiteEntry> default_suite();

/// Float slack allowed above the bound. Primal gaps are checked as
/// gap + f_star_error <= bound + slack.
double bound_tolerance(double f_star);

}  // namespace modelopt
