#include "modelopt/geometry.hpp"

#include <limits>
#include <numeric>
#include <sstream>

namespace modelopt {

using detail::overloaded;

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RejectedInput: return "rejected input";
    case ErrorKind::Evaluation: return "evaluation error";
    case ErrorKind::Capability: return "unsupported combination";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Convergence: return "convergence failure";
    case ErrorKind::Reproducibility: return "reproducibility error";
  }
  return "unknown";
}

bool all_finite(const Vector& v) { return v.allFinite(); }

std::string format_vector(const Vector& v, int max_entries) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  const Eigen::Index shown = std::min<Eigen::Index>(v.size(), max_entries);
  for (Eigen::Index i = 0; i < shown; ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  if (shown < v.size()) os << ", ... [" << v.size() << " entries]";
  os << ')';
  return os.str();
}

double Geometry::norm_of(const Vector& v) const {
  return norm == Norm::Euclidean ? v.norm() : v.lpNorm<1>();
}

namespace {

void check_entropy_domain(const Vector& x, const char* which) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0) || !std::isfinite(x[i])) {
      std::ostringstream os;
      os << "entropy prox requires nonnegative finite coordinates; " << which
         << "[" << i << "] = " << x[i];
      throw Error(ErrorKind::RejectedInput, os.str());
    }
  }
}

double clipped(double v) { return std::max(v, kEntropyFloor); }

}  // namespace

double prox_value(const Geometry& geometry, const Vector& x) {
  if (geometry.prox == Prox::HalfSquaredEuclidean) return 0.5 * x.squaredNorm();
  check_entropy_domain(x, "x");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = clipped(x[i]);
    s += xi * std::log(xi);
  }
  return s;
}

Vector prox_gradient(const Geometry& geometry, const Vector& x) {
  if (geometry.prox == Prox::HalfSquaredEuclidean) return x;
  check_entropy_domain(x, "x");
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = std::log(clipped(x[i])) + 1.0;
  return g;
}

double bregman(const Geometry& geometry, const Vector& y, const Vector& x) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::RejectedInput, "bregman: dimension mismatch");
  }
  if (geometry.prox == Prox::HalfSquaredEuclidean) {
    return 0.5 * (x - y).squaredNorm();
  }
  check_entropy_domain(x, "x");
  check_entropy_domain(y, "y");
  // sum x ln(x/y) - x + y, the generalized KL divergence.
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = clipped(x[i]);
    const double yi = clipped(y[i]);
    s += xi * std::log(xi / yi) - xi + yi;
  }
  return std::max(s, 0.0);
}

double AffineConstraints::violation(const Vector& x) const {
  const Vector r = residual(x);
  double v = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    v = std::max(v, sense[i] == Sense::Equal ? std::abs(r[i]) : r[i]);
  }
  return v;
}

void AffineConstraints::validate(Eigen::Index dim) const {
  if (B.rows() < 1) throw Error(ErrorKind::RejectedInput, "affine constraints need m >= 1 rows");
  if (B.cols() != dim) throw Error(ErrorKind::RejectedInput, "constraint matrix column count != dimension");
  if (c.size() != B.rows() || static_cast<Eigen::Index>(sense.size()) != B.rows()) {
    throw Error(ErrorKind::RejectedInput, "constraint rhs/sense length != row count");
  }
  if (!B.allFinite() || !c.allFinite()) {
    throw Error(ErrorKind::RejectedInput, "constraint rows must be finite");
  }
}

Box make_box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw Error(ErrorKind::RejectedInput, "box bounds must have equal positive length");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
      throw Error(ErrorKind::RejectedInput, "box requires lower <= upper coordinatewise");
    }
  }
  return Box{std::move(lower), std::move(upper)};
}

Ball make_ball(Vector center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorKind::RejectedInput, "ball radius must be positive and finite");
  }
  if (!center.allFinite()) throw Error(ErrorKind::RejectedInput, "ball center must be finite");
  return Ball{std::move(center), radius};
}

Box nonnegative_orthant(Eigen::Index dim) {
  return make_box(Vector::Zero(dim),
                  Vector::Constant(dim, std::numeric_limits<double>::infinity()));
}

FeasibleSet to_feasible(const SimpleSet& set) {
  return std::visit([](const auto& s) -> FeasibleSet { return s; }, set);
}

namespace {

void validate_simple(const SimpleSet& set, Eigen::Index dim) {
  std::visit(overloaded{
                 [](const WholeSpace&) {},
                 [dim](const Box& b) {
                   make_box(b.lower, b.upper);
                   if (b.lower.size() != dim) throw Error(ErrorKind::RejectedInput, "box dimension mismatch");
                 },
                 [dim](const Ball& b) {
                   make_ball(b.center, b.radius);
                   if (b.center.size() != dim) throw Error(ErrorKind::RejectedInput, "ball dimension mismatch");
                 },
                 [dim](const Simplex& s) {
                   if (s.dim != dim || dim < 1) throw Error(ErrorKind::RejectedInput, "simplex dimension mismatch");
                 },
             },
             set);
}

double simple_infeasibility(const SimpleSet& set, const Vector& x) {
  return std::visit(
      overloaded{
          [](const WholeSpace&) { return 0.0; },
          [&x](const Box& b) {
            double v = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) {
              v = std::max({v, b.lower[i] - x[i], x[i] - b.upper[i]});
            }
            return v;
          },
          [&x](const Ball& b) { return std::max(0.0, (x - b.center).norm() - b.radius); },
          [&x](const Simplex&) {
            return std::max(std::abs(x.sum() - 1.0), std::max(0.0, -x.minCoeff()));
          },
      },
      set);
}

}  // namespace

void validate_set(const FeasibleSet& set, Eigen::Index dim) {
  if (dim < 1) throw Error(ErrorKind::RejectedInput, "dimension must be positive");
  std::visit(overloaded{
                 [dim](const AffineConstrained& a) {
                   validate_simple(a.base, dim);
                   a.constraints.validate(dim);
                 },
                 [dim](const auto& s) { validate_simple(s, dim); },
             },
             set);
}

double infeasibility(const FeasibleSet& set, const Vector& x) {
  return std::visit(overloaded{
                        [&x](const AffineConstrained& a) {
                          return std::max(simple_infeasibility(a.base, x),
                                          a.constraints.violation(x));
                        },
                        [&x](const auto& s) { return simple_infeasibility(s, x); },
                    },
                    set);
}

bool contains(const FeasibleSet& set, const Vector& x, double tol) {
  return x.allFinite() && infeasibility(set, x) <= tol;
}

double linear_minimum(const SimpleSet& set, const Vector& h) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      overloaded{
          [&h](const WholeSpace&) { return h.isZero(0.0) ? 0.0 : -inf; },
          [&h](const Box& b) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < h.size(); ++i) {
              if (h[i] > 0.0) {
                s += h[i] * b.lower[i];
              } else if (h[i] < 0.0) {
                s += h[i] * b.upper[i];
              }
            }
            return s;
          },
          [&h](const Ball& b) { return h.dot(b.center) - b.radius * h.norm(); },
          [&h](const Simplex&) { return h.minCoeff(); },
      },
      set);
}

namespace {

Vector project_simplex(const Vector& v) {
  const Eigen::Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumulative += sorted[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

}  // namespace

Vector project(const SimpleSet& set, const Vector& x) {
  return std::visit(overloaded{
                        [&x](const WholeSpace&) -> Vector { return x; },
                        [&x](const Box& b) -> Vector {
                          return x.cwiseMax(b.lower).cwiseMin(b.upper);
                        },
                        [&x](const Ball& b) -> Vector {
                          const Vector d = x - b.center;
                          const double r = d.norm();
                          if (r <= b.radius) return x;
                          return b.center + (b.radius / r) * d;
                        },
                        [&x](const Simplex&) -> Vector { return project_simplex(x); },
                    },
                    set);
}

std::string describe(const FeasibleSet& set) {
  return std::visit(overloaded{
                        [](const WholeSpace&) { return std::string("whole-space"); },
                        [](const Box&) { return std::string("box"); },
                        [](const Ball&) { return std::string("ball"); },
                        [](const Simplex&) { return std::string("simplex"); },
                        [](const AffineConstrained& a) {
                          return "affine-constrained(" + describe(to_feasible(a.base)) + ", m=" +
                                 std::to_string(a.constraints.rows()) + ")";
                        },
                    },
                    set);
}

}  // namespace modelopt
