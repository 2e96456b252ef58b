#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modelopt/builders.hpp"
#include "modelopt/subproblem.hpp"

namespace modelopt {

enum class Method { GM, FGM, GMRelative, PDGM, PDFGM, SFGM, ASFGM };

const char* method_name(Method m);         // "gm", "fgm", "gm-rel", ...
std::optional<Method> parse_method(const std::string& name);
bool is_primal_dual(Method m);

struct SolverConfig {
  double L0 = 1.0;
  /// delta_k; an empty sequence means "use the delta the oracle reports".
  std::vector<double> delta_seq;
  /// delta-tilde_k, consumed only by the bound calculator (closed-form inner
  /// solves are exact). Empty means zero.
  std::vector<double> delta_tilde_seq;
  int max_iters = 100;
  /// Stop once the theorem's right-hand side (with r2_for_stop) is <= this.
  std::optional<double> epsilon_stop;
  std::optional<double> r2_for_stop;
  std::optional<std::uint64_t> seed;
  // Heuristic adaptive stochastic method.
  double eps = 1e-3;
  double sigma0_sq = 1.0;
  // Mini-batch size for the non-adaptive stochastic method when it builds
  // its own oracle from a sampler.
  std::size_t batch = 1;

  int line_search_cap = 60;
  double L_floor = 1e-12;
  bool keep_iterates = true;
  bool record_timing = true;
  /// Exact objective, used for reporting only.
  std::function<double(const Vector&)> report_f;

  /// delta_k with constant extension of the last entry; nullopt when empty.
  std::optional<double> delta_at(int k) const;
  double delta_tilde_at(int k) const;
};

struct IterRecord {
  int k = 0;
  int i_k = 0;
  double L_next = 0.0;
  double alpha_next = 0.0;
  double A_next = 0.0;
  Vector x;  // x_{k+1} (primal output sequence)
  Vector y;  // y_{k+1} for three-sequence methods
  Vector u;  // u_{k+1}
  std::optional<Vector> z;
  std::optional<std::int64_t> m_batch;
  double f_x = std::numeric_limits<double>::quiet_NaN();    // f(x_{k+1})
  double f_bar = std::numeric_limits<double>::quiet_NaN();  // f(x-bar_{k+1})
  std::int64_t oracle_calls = 0;                            // cumulative model queries
  double delta = 0.0;
  double delta_tilde = 0.0;
  // Accepted line-search inequality: lhs <= rhs + slack.
  double exit_lhs = 0.0;
  double exit_rhs = 0.0;
  double exit_slack = 0.0;
  std::int64_t wall_ns = 0;
};

struct RunTrace {
  Method method = Method::GM;
  std::vector<IterRecord> records;
  Vector x0;
  Vector x_out;                 // x-bar_N or x_N, per method
  std::optional<Vector> z_out;  // z-bar_N for primal-dual methods
  double L0 = 0.0;
  std::optional<double> L_fixed;
  std::int64_t oracle_calls = 0;  // model queries
  std::int64_t value_calls = 0;   // f_delta-only queries
  std::int64_t inner_trials = 0;  // subproblem solves
  std::int64_t samples = 0;       // stochastic samples consumed
  std::int64_t wall_ns = 0;
  bool stopped_early = false;

  int iterations() const { return static_cast<int>(records.size()); }
  double A_N() const { return records.empty() ? 0.0 : records.back().A_next; }
};

/// Largest root of L a^2 - a - A = 0.
double largest_root(double A, double L);

RunTrace run_gm_adaptive(ModelOracle& oracle, const Geometry& geometry, const FeasibleSet& set,
                         const SolverConfig& config, const Vector& x0);

RunTrace run_fgm_adaptive(ModelOracle& oracle, const Geometry& geometry, const FeasibleSet& set,
                          const SolverConfig& config, const Vector& x0);

/// Fixed-L Bregman gradient method; the geometry need not be strongly convex.
RunTrace run_gm_relative(ModelOracle& oracle, const Geometry& geometry, const FeasibleSet& set,
                         double L, const SolverConfig& config, const Vector& x0);

RunTrace run_pd_gm(ModelOracle& oracle, const Geometry& geometry, const FeasibleSet& set,
                   const SolverConfig& config, const Vector& x0);

RunTrace run_pd_fgm(ModelOracle& oracle, const Geometry& geometry, const FeasibleSet& set,
                    const SolverConfig& config, const Vector& x0);

/// Non-adaptive fast gradient method with fixed L over the Euclidean
/// geometry; accepts deterministic or stochastic oracles.
RunTrace run_sfgm(ModelOracle& oracle, const FeasibleSet& set, double L, const SolverConfig& config,
                  const Vector& x0);

/// Adaptive stochastic fast gradient method with the mini-batch sizing
/// rule m = ceil(3 sigma0^2 alpha~ / eps). No convergence guarantee.
RunTrace run_heuristic_asfgm(const StochasticSampler& sampler, const FeasibleSet& set,
                             const SolverConfig& config, const Vector& x0);

enum class Theorem { GM, FGM, GMRelative, PDGM, PDFGM, SFGM };

const char* theorem_name(Theorem t);
std::optional<Theorem> parse_theorem(const std::string& name);
std::optional<Theorem> theorem_for(Method m);

struct BoundInputs {
  std::optional<double> L;            // fixed L for gm-rel / sfgm (defaults to trace.L_fixed)
  std::vector<double> delta_seq;      // empty: use the deltas recorded in the trace
  std::vector<double> delta_tilde_seq;
};

struct BoundReport {
  Theorem theorem = Theorem::GM;
  double r2 = 0.0;
  std::vector<double> per_iteration;  // bound after N = 1, 2, ...
  double main_term = 0.0;             // R^2 / A_N style term
  double delta_tilde_term = 0.0;
  double delta_term = 0.0;
  double total() const { return main_term + delta_tilde_term + delta_term; }
};

/// Right-hand side of the convergence theorem matching the trace's method,
/// computed from the recorded A_k, alpha_k, L_k and the error sequences.
BoundReport theoretical_bound(const RunTrace& trace, double r2, Theorem theorem,
                              const BoundInputs& inputs = {});

/// Incremental form shared by theoretical_bound and the solvers' bound-based
/// stopping rule.
class BoundAccumulator {
 public:
  BoundAccumulator(Theorem theorem, double r2, std::optional<double> L);

  /// Feeds iteration k (0-based) and returns the bound at N = k + 1.
  double add(int k, double L_next, double alpha_next, double A_next, double delta,
             double delta_tilde);

  double main_term() const { return main_; }
  double delta_tilde_term() const { return dt_term_; }
  double delta_term() const { return d_term_; }

 private:
  Theorem theorem_;
  double r2_;
  std::optional<double> L_;
  double sum_dt_ = 0.0;
  double sum_d_ = 0.0;
  double main_ = 0.0;
  double dt_term_ = 0.0;
  double d_term_ = 0.0;
};

}  // namespace modelopt
