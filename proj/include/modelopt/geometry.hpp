#pragma once

#include <variant>
#include <vector>

#include "modelopt/types.hpp"

namespace modelopt {

enum class Norm { Euclidean, L1 };
enum class Prox { HalfSquaredEuclidean, NegativeEntropy };

/// Norm plus distance-generating function. `strongly_convex` records whether
/// the prox is 1-strongly convex w.r.t. the norm; it is false only for the
/// relative-smoothness setting.
struct Geometry {
  Norm norm = Norm::Euclidean;
  Prox prox = Prox::HalfSquaredEuclidean;
  bool strongly_convex = true;

  static Geometry euclidean() { return {}; }
  static Geometry entropy_simplex() {
    return {Norm::L1, Prox::NegativeEntropy, true};
  }
  /// Same norm/prox with the strong-convexity requirement dropped.
  Geometry relaxed() const { return {norm, prox, false}; }

  double norm_of(const Vector& v) const;
};

// Smallest coordinate fed to log() under the entropy prox.
inline constexpr double kEntropyFloor = 1e-300;

/// d(x) for the geometry's prox.
double prox_value(const Geometry& geometry, const Vector& x);
/// Gradient of d at x.
Vector prox_gradient(const Geometry& geometry, const Vector& x);

/// V[y](x) = d(x) - d(y) - <grad d(y), x - y>.
double bregman(const Geometry& geometry, const Vector& y, const Vector& x);

struct WholeSpace {};

struct Box {
  Vector lower;
  Vector upper;
};

struct Ball {
  Vector center;
  double radius = 1.0;
};

struct Simplex {
  Eigen::Index dim = 0;
};

using SimpleSet = std::variant<WholeSpace, Box, Ball, Simplex>;

enum class Sense { LessEqual, Equal };

/// Rows of F(x) = Bx - c with a per-row sense (F_i <= 0 or F_i = 0).
struct AffineConstraints {
  Matrix B;
  Vector c;
  std::vector<Sense> sense;

  Eigen::Index rows() const { return B.rows(); }
  Vector residual(const Vector& x) const { return B * x - c; }
  /// Largest violation of the rows at x (0 when feasible).
  double violation(const Vector& x) const;
  void validate(Eigen::Index dim) const;
};

struct AffineConstrained {
  SimpleSet base;
  AffineConstraints constraints;
};

using FeasibleSet =
    std::variant<WholeSpace, Box, Ball, Simplex, AffineConstrained>;

Box make_box(Vector lower, Vector upper);
Ball make_ball(Vector center, double radius);
Box nonnegative_orthant(Eigen::Index dim);

FeasibleSet to_feasible(const SimpleSet& set);

/// Throws RejectedInput when the set is malformed or its dimension disagrees.
void validate_set(const FeasibleSet& set, Eigen::Index dim);

/// Distance-like infeasibility measure (max coordinate violation).
double infeasibility(const FeasibleSet& set, const Vector& x);
bool contains(const FeasibleSet& set, const Vector& x, double tol = 1e-10);

/// min over the set of <h, x>; -inf when unbounded below.
double linear_minimum(const SimpleSet& set, const Vector& h);

/// Euclidean projection onto a simple set.
Vector project(const SimpleSet& set, const Vector& x);

std::string describe(const FeasibleSet& set);

}  // namespace modelopt
