#pragma once

#include <optional>

#include "modelopt/model.hpp"

namespace modelopt {

/// min over `set` of  model_weight * psi(x) + bregman_weight * V[center](x).
struct SubproblemSpec {
  Vector center;
  double bregman_weight = 1.0;
  double model_weight = 1.0;
  ModelPart model;
  Geometry geometry;
  FeasibleSet set;
  // Caller-supplied bound on the set diameter; scales the KKT residual into
  // the inexactness certificate reported by argdual.
  double diameter_bound = 1.0;

  /// Value of the subproblem objective at x.
  double objective(const Vector& x) const;
};

struct DualPair {
  Vector x;
  Vector z;
};

struct SubproblemSolution {
  Vector point;
  double delta_tilde_cert = 0.0;
  std::optional<DualPair> dual;
  int inner_iterations = 0;
};

/// Closed-form solve for the supported (prox, set, model) table; affinely
/// constrained sets are routed to argdual. Unsupported combinations raise
/// ErrorKind::Capability.
SubproblemSolution solve(const SubproblemSpec& spec);

struct ArgdualOptions {
  int max_iterations = 500;
  // Stop when the projected dual gradient satisfies
  // ||res||_inf <= tolerance * (1 + ||c||).
  double tolerance = 1e-10;
  double divergence_guard = 1e14;
};

/// Primal minimizer and Lagrange multipliers of the subproblem over an
/// AffineConstrained set, by projected Newton ascent on the concave dual.
SubproblemSolution argdual(const SubproblemSpec& spec, const ArgdualOptions& options = {});

struct KktResiduals {
  double primal = 0.0;          // constraint violation
  double dual = 0.0;            // max(0, -z_i) over inequality rows
  double complementarity = 0.0; // max |z_i * F_i(x)| over inequality rows
  double stationarity = 0.0;    // distance of -grad L from the base-set normal cone
  double max() const;
};

KktResiduals kkt_residuals(const SubproblemSpec& spec, const DualPair& pair);

struct InexactCheck {
  bool accepted = false;
  Vector witness;           // the subgradient h
  double min_inner = 0.0;   // min over the set of <h, x - candidate>
};

/// Checks <h, x - candidate> >= -delta_tilde for all x in the set, for the
/// best subgradient h of the subproblem objective at the candidate.
InexactCheck verify_inexact_solution(const SubproblemSpec& spec, const Vector& candidate,
                                     double delta_tilde);

}  // namespace modelopt
