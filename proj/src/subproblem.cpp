#include "modelopt/subproblem.hpp"

#include <limits>
#include <sstream>

namespace modelopt {

using detail::overloaded;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void unsupported(const SubproblemSpec& spec, const std::string& why) {
  std::ostringstream os;
  os << "subproblem solver does not support prox="
     << (spec.geometry.prox == Prox::HalfSquaredEuclidean ? "half-squared-euclidean" : "negative-entropy")
     << " over " << describe(spec.set) << " with model "
     << (spec.model.is_linear() ? "linear"
                                : (spec.model.simple->kind == SimpleConvexFn::Kind::L1 ? "linear+l1"
                                                                                      : "linear+neg-entropy"))
     << ": " << why;
  throw Error(ErrorKind::Capability, os.str());
}

void validate_spec(const SubproblemSpec& spec) {
  const Eigen::Index n = spec.center.size();
  if (n == 0 || !spec.center.allFinite()) {
    throw Error(ErrorKind::RejectedInput, "subproblem center must be finite and non-empty");
  }
  if (!(spec.bregman_weight > 0.0) || !std::isfinite(spec.bregman_weight)) {
    throw Error(ErrorKind::RejectedInput, "bregman weight must be positive");
  }
  if (!(spec.model_weight >= 0.0) || !std::isfinite(spec.model_weight)) {
    throw Error(ErrorKind::RejectedInput, "model weight must be nonnegative");
  }
  if (spec.model.g.size() != n || spec.model.anchor.size() != n) {
    throw Error(ErrorKind::RejectedInput, "model dimension does not match the center");
  }
  if (!spec.model.g.allFinite()) throw Error(ErrorKind::RejectedInput, "model gradient must be finite");
  validate_set(spec.set, n);
}

bool simple_is(const ModelPart& m, SimpleConvexFn::Kind kind) {
  return m.simple && m.simple->kind == kind && m.simple->scale != 0.0;
}

struct ScalarSolve {
  double x;
  double slope;  // dx/dt, in [-1/b, 0]
};

// argmin over [lo, hi] of t*x + a*simple(x) + (b/2)(x - u)^2.
ScalarSolve scalar_minimizer(double t, double u, double a, double b,
                             const std::optional<SimpleConvexFn>& simple, double lo, double hi) {
  ScalarSolve r{u - t / b, -1.0 / b};
  if (simple && simple->scale != 0.0) {
    if (simple->kind == SimpleConvexFn::Kind::L1) {
      const double threshold = a * simple->scale / b;
      const double v = r.x;
      if (std::abs(v) <= threshold) {
        r = {0.0, 0.0};
      } else {
        r.x = v > 0.0 ? v - threshold : v + threshold;
      }
    } else {
      // Stationarity in s = ln x: t + k (s + 1) + b (e^s - u) = 0, with k the
      // entropy weight. F is convex increasing; Newton from an upper bound on
      // the root converges monotonically.
      const double k = a * simple->scale;
      const double excess = b * u - t;
      double s = std::min(excess / k - 1.0, std::log(std::max(std::exp(-1.0), excess / b)));
      for (int it = 0; it < 200; ++it) {
        const double es = std::exp(s);
        const double F = t + k * (s + 1.0) + b * (es - u);
        const double step = F / (k + b * es);
        s -= step;
        if (std::abs(step) <= 4e-16 * std::max(1.0, std::abs(s))) break;
      }
      r.x = std::exp(s);
      r.slope = r.x > 0.0 ? -1.0 / (k / r.x + b) : 0.0;
      lo = std::max(lo, 0.0);
      if (hi < 0.0) throw Error(ErrorKind::Infeasible, "box excludes the entropy domain x >= 0");
    }
  }
  if (r.x < lo) {
    r = {lo, 0.0};
  } else if (r.x > hi) {
    r = {hi, 0.0};
  }
  return r;
}

struct SeparableSolve {
  Vector x;
  Vector slope;
};

// Euclidean prox over WholeSpace / Box with total linear coefficient t.
SeparableSolve separable_minimizer(const SubproblemSpec& spec, const SimpleSet& base,
                                   const Vector& t) {
  const Eigen::Index n = spec.center.size();
  SeparableSolve out{Vector(n), Vector(n)};
  const Box* box = std::get_if<Box>(&base);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lo = box ? box->lower[i] : -kInf;
    const double hi = box ? box->upper[i] : kInf;
    const ScalarSolve s = scalar_minimizer(t[i], spec.center[i], spec.model_weight,
                                           spec.bregman_weight, spec.model.simple, lo, hi);
    out.x[i] = s.x;
    out.slope[i] = s.slope;
  }
  return out;
}

Vector entropy_simplex_minimizer(const SubproblemSpec& spec) {
  const double a = spec.model_weight;
  const double b = spec.bregman_weight;
  const Eigen::Index n = spec.center.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(spec.center[i] >= 0.0)) {
      throw Error(ErrorKind::RejectedInput, "entropy prox center must be nonnegative");
    }
  }
  const double ent = simple_is(spec.model, SimpleConvexFn::Kind::NegEntropy) ? a * spec.model.simple->scale : 0.0;
  Vector logits(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lu = std::log(std::max(spec.center[i], kEntropyFloor));
    logits[i] = (b * lu - a * spec.model.g[i]) / (b + ent);
  }
  const double top = logits.maxCoeff();
  Vector w = (logits.array() - top).exp().matrix();
  return w / w.sum();
}

}  // namespace

double SubproblemSpec::objective(const Vector& x) const {
  return model_weight * model(x) + bregman_weight * bregman(geometry, center, x);
}

SubproblemSolution solve(const SubproblemSpec& spec) {
  validate_spec(spec);
  if (std::holds_alternative<AffineConstrained>(spec.set)) return argdual(spec);

  const double a = spec.model_weight;
  const double b = spec.bregman_weight;
  const bool has_entropy_term = simple_is(spec.model, SimpleConvexFn::Kind::NegEntropy);
  const bool has_l1 = simple_is(spec.model, SimpleConvexFn::Kind::L1);

  SubproblemSolution sol;
  if (spec.geometry.prox == Prox::NegativeEntropy) {
    if (!std::holds_alternative<Simplex>(spec.set)) {
      unsupported(spec, "the entropy prox is only paired with the simplex");
    }
    sol.point = entropy_simplex_minimizer(spec);
    return sol;
  }

  const Vector t = a * spec.model.g;
  std::visit(overloaded{
                 [&](const WholeSpace& s) { sol.point = separable_minimizer(spec, s, t).x; },
                 [&](const Box& s) { sol.point = separable_minimizer(spec, s, t).x; },
                 [&](const Ball& s) {
                   if (has_entropy_term) unsupported(spec, "entropy term has no closed form over a ball");
                   if (has_l1 && !s.center.isZero(0.0)) {
                     unsupported(spec, "l1 term over a ball needs the ball centered at the origin");
                   }
                   const Vector free = separable_minimizer(spec, WholeSpace{}, t).x;
                   sol.point = project(s, free);
                 },
                 [&](const Simplex& s) {
                   if (has_entropy_term) unsupported(spec, "entropy term with the euclidean prox over a simplex");
                   // The l1 term is constant on the simplex.
                   sol.point = project(s, spec.center - (a / b) * spec.model.g);
                 },
                 [&](const AffineConstrained&) {},
             },
             spec.set);
  return sol;
}

double KktResiduals::max() const {
  return std::max({primal, dual, complementarity, stationarity});
}

namespace {

struct DualState {
  Vector z;
  Vector x;
  Vector slope;
  Vector r;    // Bx - c
  Vector res;  // projected dual gradient
  double theta = 0.0;
};

}  // namespace

SubproblemSolution argdual(const SubproblemSpec& spec, const ArgdualOptions& options) {
  validate_spec(spec);
  const auto* constrained = std::get_if<AffineConstrained>(&spec.set);
  if (!constrained) throw Error(ErrorKind::RejectedInput, "argdual needs an affinely constrained set");
  if (spec.geometry.prox != Prox::HalfSquaredEuclidean) {
    unsupported(spec, "argdual runs over the euclidean prox only");
  }
  const SimpleSet& base = constrained->base;
  if (!std::holds_alternative<WholeSpace>(base) && !std::holds_alternative<Box>(base)) {
    unsupported(spec, "argdual base set must be the whole space or a box");
  }
  const AffineConstraints& F = constrained->constraints;
  const Matrix& B = F.B;
  const Eigen::Index m = F.rows();
  const double a = spec.model_weight;
  const double b = spec.bregman_weight;
  const Vector ag = a * spec.model.g;
  const double tol = options.tolerance * (1.0 + F.c.norm());

  std::vector<bool> is_eq(m);
  for (Eigen::Index i = 0; i < m; ++i) is_eq[i] = F.sense[i] == Sense::Equal;

  auto project_z = [&](Vector z) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!is_eq[i]) z[i] = std::max(z[i], 0.0);
    }
    return z;
  };

  auto evaluate = [&](Vector z) {
    DualState s;
    s.z = std::move(z);
    SeparableSolve inner = separable_minimizer(spec, base, ag + B.transpose() * s.z);
    s.x = std::move(inner.x);
    s.slope = std::move(inner.slope);
    s.r = B * s.x - F.c;
    s.res.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      s.res[i] = is_eq[i] ? s.r[i] : s.z[i] - std::max(0.0, s.z[i] + s.r[i]);
    }
    s.theta = spec.objective(s.x) + s.z.dot(s.r);
    return s;
  };

  // Coordinates along which the base set is unbounded; a certificate must
  // have (B^T d)_j == 0 there.
  std::vector<Eigen::Index> open_cols;
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    const auto* box = std::get_if<Box>(&base);
    if (!box || !std::isfinite(box->lower[j]) || !std::isfinite(box->upper[j])) open_cols.push_back(j);
  }
  Matrix B_open(m, static_cast<Eigen::Index>(open_cols.size()));
  for (std::size_t k = 0; k < open_cols.size(); ++k) B_open.col(static_cast<Eigen::Index>(k)) = B.col(open_cols[k]);
  Eigen::CompleteOrthogonalDecomposition<Matrix> open_cod;
  if (!open_cols.empty()) open_cod.compute(B_open);

  // Farkas-type test: if min over the base set of d^T (Bx - c) is positive
  // for some admissible d, theta grows without bound along d.
  auto certifies = [&](Vector d) {
    const double d0 = d.norm();
    for (int pass = 0; pass < 50; ++pass) {
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!is_eq[i]) d[i] = std::max(d[i], 0.0);
      }
      if (open_cols.empty() || d.norm() == 0.0) break;
      const Vector drift = B_open.transpose() * d;
      if (drift.norm() <= 1e-14 * d.norm()) break;
      d -= B_open * open_cod.solve(d);  // onto the null space of B_open^T
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!is_eq[i]) d[i] = std::max(d[i], 0.0);
    }
    // A direction that collapses under the projections carries no certificate.
    if (d.norm() <= 1e-6 * d0) return false;
    d.normalize();
    Vector w = B.transpose() * d;
    const double scale = B.norm() + F.c.norm() + 1.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (std::abs(w[i]) <= 1e-12 * scale) w[i] = 0.0;
    }
    const double slope = linear_minimum(base, w) - d.dot(F.c);
    return slope > 1e-9 * scale;
  };
  auto unbounded_along = [&](const DualState& s) {
    Vector d(m);
    for (Eigen::Index i = 0; i < m; ++i) d[i] = is_eq[i] ? s.r[i] : std::max(s.r[i], 0.0);
    return certifies(d) || certifies(s.z);
  };

  const double lipschitz = std::max(B.squaredNorm(), 1e-300) / b;  // Frobenius bound on ||B||^2 / b
  DualState cur = evaluate(Vector::Zero(m));
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const double res_norm = cur.res.lpNorm<Eigen::Infinity>();
    if (res_norm <= tol) break;
    if (!cur.z.allFinite() || cur.z.lpNorm<Eigen::Infinity>() > options.divergence_guard) {
      throw Error(ErrorKind::Infeasible, "argdual: multipliers diverged; constraint system looks infeasible");
    }

    std::vector<Eigen::Index> free_rows;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (is_eq[i] || cur.z[i] > 0.0 || cur.r[i] > 0.0) free_rows.push_back(i);
    }
    Vector direction = Vector::Zero(m);
    if (!free_rows.empty()) {
      const Eigen::Index k = static_cast<Eigen::Index>(free_rows.size());
      Matrix Bf(k, B.cols());
      Vector rf(k);
      for (Eigen::Index j = 0; j < k; ++j) {
        Bf.row(j) = B.row(free_rows[j]);
        rf[j] = cur.r[free_rows[j]];
      }
      Matrix H = Bf * (-cur.slope).asDiagonal() * Bf.transpose();
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(H);
      cod.setThreshold(1e-13);
      if (cod.rank() < k) {
        // Rows whose support is fully clamped make H singular; a small ridge
        // keeps the direction an ascent direction.
        const double scale = H.diagonal().maxCoeff();
        H.diagonal().array() += 1e-10 * (scale > 0.0 ? scale : Bf.squaredNorm() / b);
        cod.compute(H);
      }
      const Vector df = cod.solve(rf);
      for (Eigen::Index j = 0; j < k; ++j) direction[free_rows[j]] = df[j];
    }

    bool accepted = false;
    if (direction.allFinite() && direction.norm() > 0.0) {
      double step = 1.0;
      for (int ls = 0; ls < 40; ++ls, step *= 0.5) {
        DualState trial = evaluate(project_z(cur.z + step * direction));
        const double ascent = cur.r.dot(trial.z - cur.z);
        const bool armijo = ascent > 0.0 && trial.theta >= cur.theta + 1e-4 * ascent;
        const bool residual_drop = trial.res.lpNorm<Eigen::Infinity>() <= (1.0 - 1e-4 * step) * res_norm &&
                                   trial.theta >= cur.theta - 1e-12 * std::max(1.0, std::abs(cur.theta));
        if (armijo || residual_drop) {
          cur = std::move(trial);
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      if (unbounded_along(cur)) {
        throw Error(ErrorKind::Infeasible,
                    "argdual: dual function is unbounded above; affine constraints are infeasible");
      }
      // Projected gradient with backtracking from a long step; 1/lipschitz
      // always ascends.
      double step = 64.0 / lipschitz;
      DualState trial = evaluate(project_z(cur.z + step * cur.r));
      while (step > 1.0 / lipschitz && trial.theta < cur.theta + 1e-4 * cur.r.dot(trial.z - cur.z)) {
        step *= 0.5;
        trial = evaluate(project_z(cur.z + step * cur.r));
      }
      cur = std::move(trial);
    }
  }
  const double final_res = cur.res.lpNorm<Eigen::Infinity>();
  if (final_res > tol) {
    if (unbounded_along(cur)) {
      throw Error(ErrorKind::Infeasible,
                  "argdual: dual function is unbounded above; affine constraints are infeasible");
    }
    std::ostringstream os;
    os << "argdual: no convergence after " << it << " iterations; projected dual residual "
       << final_res << " > " << tol;
    throw Error(ErrorKind::Convergence, os.str());
  }

  SubproblemSolution sol;
  sol.point = cur.x;
  sol.delta_tilde_cert = cur.res.norm() * spec.diameter_bound;
  sol.dual = DualPair{cur.x, cur.z};
  sol.inner_iterations = it;
  return sol;
}

KktResiduals kkt_residuals(const SubproblemSpec& spec, const DualPair& pair) {
  const auto* constrained = std::get_if<AffineConstrained>(&spec.set);
  if (!constrained) throw Error(ErrorKind::RejectedInput, "KKT residuals need an affinely constrained set");
  const AffineConstraints& F = constrained->constraints;
  const Vector r = F.residual(pair.x);
  KktResiduals k;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (F.sense[i] == Sense::Equal) {
      k.primal = std::max(k.primal, std::abs(r[i]));
    } else {
      k.primal = std::max(k.primal, r[i]);
      k.dual = std::max(k.dual, -pair.z[i]);
      k.complementarity = std::max(k.complementarity, std::abs(pair.z[i] * r[i]));
    }
  }
  // Stationarity: 0 in a*grad psi + b*grad V + B^T z + N_base(x), coordinatewise.
  const Vector fixed = spec.model_weight * spec.model.g +
                       spec.bregman_weight * (prox_gradient(spec.geometry, pair.x) -
                                              prox_gradient(spec.geometry, spec.center)) +
                       F.B.transpose() * pair.z;
  const Box* box = std::get_if<Box>(&constrained->base);
  for (Eigen::Index i = 0; i < fixed.size(); ++i) {
    double lo = fixed[i];
    double hi = fixed[i];
    if (spec.model.simple) {
      const auto [slo, shi] = spec.model.simple->subgradient_interval(pair.x[i]);
      lo += spec.model_weight * slo;
      hi += spec.model_weight * shi;
    }
    // Normal cone of the box at x_i: (-inf, 0] at the lower bound, [0, inf) at the upper.
    const bool at_lower = box && pair.x[i] <= box->lower[i];
    const bool at_upper = box && pair.x[i] >= box->upper[i];
    double dist;
    if (lo <= 0.0 && 0.0 <= hi) {
      dist = 0.0;
    } else if (lo > 0.0) {
      dist = at_lower ? 0.0 : lo;
    } else {
      dist = at_upper ? 0.0 : -hi;
    }
    k.stationarity = std::max(k.stationarity, dist);
  }
  return k;
}

InexactCheck verify_inexact_solution(const SubproblemSpec& spec, const Vector& candidate,
                                     double delta_tilde) {
  validate_spec(spec);
  if (std::holds_alternative<AffineConstrained>(spec.set)) {
    throw Error(ErrorKind::Capability,
                "inexact-argmin check needs a simple set; verify constrained solves through argdual KKT residuals");
  }
  if (candidate.size() != spec.center.size() || !candidate.allFinite()) {
    throw Error(ErrorKind::RejectedInput, "candidate dimension mismatch or non-finite");
  }
  const double a = spec.model_weight;
  const double b = spec.bregman_weight;
  const Eigen::Index n = candidate.size();
  const Vector fixed =
      a * spec.model.g +
      b * (prox_gradient(spec.geometry, candidate) - prox_gradient(spec.geometry, spec.center));

  Vector lo = fixed;
  Vector hi = fixed;
  if (spec.model.simple) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto [slo, shi] = spec.model.simple->subgradient_interval(candidate[i]);
      lo[i] += a * slo;
      hi[i] += a * shi;
    }
  }

  InexactCheck out;
  out.witness = Vector(n);
  const SimpleSet base = std::visit(
      overloaded{[](const AffineConstrained& s) -> SimpleSet { return s.base; },
                 [](const auto& s) -> SimpleSet { return s; }},
      spec.set);

  // Floating-point floor below which a subgradient coordinate counts as zero
  // along unbounded directions.
  auto noise_floor = [&](Eigen::Index i) {
    return 1e-12 * (std::abs(a * spec.model.g[i]) + b * (std::abs(candidate[i]) + std::abs(spec.center[i])) + 1.0);
  };

  if (std::holds_alternative<WholeSpace>(base) || std::holds_alternative<Box>(base)) {
    const Box* box = std::get_if<Box>(&base);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lower = box ? box->lower[i] : -kInf;
      const double upper = box ? box->upper[i] : kInf;
      auto term = [&](double h) {
        if (std::abs(h) <= noise_floor(i) &&
            (!std::isfinite(lower) || !std::isfinite(upper))) {
          h = 0.0;
        }
        if (h > 0.0) return std::make_pair(h * (lower - candidate[i]), h);
        if (h < 0.0) return std::make_pair(h * (upper - candidate[i]), h);
        return std::make_pair(0.0, 0.0);
      };
      auto best = term(std::clamp(0.0, lo[i], hi[i]));
      for (double h : {lo[i], hi[i]}) {
        const auto cand = term(h);
        if (cand.first > best.first) best = cand;
      }
      total += best.first;
      out.witness[i] = best.second;
    }
    out.min_inner = total;
  } else {
    for (Eigen::Index i = 0; i < n; ++i) out.witness[i] = std::clamp(0.0, lo[i], hi[i]);
    out.min_inner = linear_minimum(base, out.witness) - out.witness.dot(candidate);
  }
  out.accepted = out.min_inner >= -delta_tilde;
  return out;
}

}  // namespace modelopt
