#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "modelopt/geometry.hpp"

namespace modelopt {

/// Closed enumeration of simple convex terms the subproblem solvers can
/// handle in closed form.
struct SimpleConvexFn {
  enum class Kind { L1, NegEntropy };

  Kind kind = Kind::L1;
  double scale = 1.0;

  static SimpleConvexFn l1(double scale) { return {Kind::L1, scale}; }
  static SimpleConvexFn neg_entropy(double scale) { return {Kind::NegEntropy, scale}; }

  /// +inf outside the domain (negative coordinates for NegEntropy).
  double operator()(const Vector& x) const;
  /// Subdifferential of coordinate i at value xi, as an interval [lo, hi].
  std::pair<double, double> subgradient_interval(double xi) const;
};

/// psi(x, y) = <g, x - y> [+ simple(x) - base_value], anchored at y.
struct ModelPart {
  Vector anchor;
  Vector g;
  std::optional<SimpleConvexFn> simple;
  double base_value = 0.0;

  static ModelPart linear(Vector anchor, Vector g);
  static ModelPart linear_plus_simple(Vector anchor, Vector g, SimpleConvexFn simple);

  double operator()(const Vector& x) const;
  bool is_linear() const { return !simple.has_value(); }
};

struct ModelEvaluation {
  double f_value = 0.0;
  ModelPart part;
  double delta = 0.0;
  std::optional<double> lip_hint;
};

enum class OracleKind { Deterministic, Stochastic };

/// Answers a query point y with (f_delta(y), psi_delta(., y), delta).
///
/// Deterministic oracles are pure. Stochastic oracles advance an internal call
/// counter and derive their randomness from (seed, call index), so a fresh
/// instance with the same seed replays the same evaluations.
class ModelOracle {
 public:
  virtual ~ModelOracle() = default;

  virtual ModelEvaluation query(const Vector& y) = 0;
  /// f_delta(x) alone; the exit tests of the line searches only need this.
  virtual double value(const Vector& x) { return query(x).f_value; }
  virtual OracleKind kind() const { return OracleKind::Deterministic; }
};

using OraclePtr = std::shared_ptr<ModelOracle>;

enum class InequalityKind { NormModel, BregmanModel };

struct PairResidual {
  double lower = 0.0;  // f(x) - f_delta(y) - psi(x, y)
  double slack = 0.0;  // upper bound minus lower
  bool violated = false;
};

struct ModelCheckReport {
  std::vector<PairResidual> pairs;
  std::size_t violations = 0;
  double min_lower = 0.0;
  double min_slack = 0.0;
};

/// Evaluates both sides of the model inequality at every (x, y) pair and
/// flags violations beyond 1e-10 * max(1, |f(x)|).
ModelCheckReport check_model_inequality(const std::function<double(const Vector&)>& true_f,
                                        ModelOracle& oracle, double L, const Geometry& geometry,
                                        const std::vector<std::pair<Vector, Vector>>& sample_pairs,
                                        InequalityKind kind);

}  // namespace modelopt
