#pragma once

#include <map>
#include <string>
#include <vector>

#include "modelopt/builders.hpp"

namespace modelopt {

using ProblemParams = std::map<std::string, std::string>;

/// g(z) = max over the base set of [-f(x) - <z, Bx - c>] and its maximizer.
struct DualEvaluator {
  std::function<double(const Vector&)> g;
  std::function<Vector(const Vector&)> maximizer;
};

struct ProblemInstance {
  std::string name;
  ProblemParams params;
  Eigen::Index dim = 0;
  OraclePtr oracle;  // deterministic model oracle of the exact objective
  Geometry geometry;
  FeasibleSet set;
  ScalarFn f;  // exact objective, reporting only
  Vector x0;
  std::optional<Vector> x_star;
  double f_star = 0.0;
  /// Certified bound on |f_star - true optimum| (0 for closed forms).
  double f_star_error = 0.0;
  /// Upper bound on V[x0](x_*), inflated by any uncertainty in x_*.
  double r2 = 0.0;
  double true_L = 1.0;
  std::optional<StochasticSampler> sampler;
  std::optional<DualEvaluator> dual;
  std::optional<Vector> z_star;

  bool constrained() const { return std::holds_alternative<AffineConstrained>(set); }
};

std::vector<std::string> problem_names();

/// Parameters by name (all optional):
///   quadratic             n, kappa, a (comma list), noise, seed
///   logistic-synthetic    n, samples, ridge, seed
///   lasso-composite       n, samples, lambda, seed
///   holder-abs            n, nu (must be 0), delta
///   simplex-linear-entropy n, L, seed
///   projection-qp         (none)
///   transport-toy         mu, gamma
///   stochastic-quadratic  n, kappa, sigma, seed
ProblemInstance build_problem(const std::string& name, const ProblemParams& params = {});

/// g(z) for problems that carry a dual evaluator; Capability error otherwise.
double eval_dual(const ProblemInstance& problem, const Vector& z);

/// Fresh stochastic oracle for problems with a sampler.
std::shared_ptr<MiniBatchOracle> make_minibatch_oracle(const ProblemInstance& problem,
                                                       std::size_t batch, std::uint64_t seed);

/// "k=v" pairs into params; RejectedInput on malformed entries.
ProblemParams parse_params(const std::vector<std::string>& pairs);

}  // namespace modelopt
