#include "modelopt/solvers.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace modelopt {

const char* method_name(Method m) {
  switch (m) {
    case Method::GM: return "gm";
    case Method::FGM: return "fgm";
    case Method::GMRelative: return "gm-rel";
    case Method::PDGM: return "pd-gm";
    case Method::PDFGM: return "pd-fgm";
    case Method::SFGM: return "sfgm";
    case Method::ASFGM: return "asfgm";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  for (Method m : {Method::GM, Method::FGM, Method::GMRelative, Method::PDGM, Method::PDFGM,
                   Method::SFGM, Method::ASFGM}) {
    if (name == method_name(m)) return m;
  }
  return std::nullopt;
}

bool is_primal_dual(Method m) { return m == Method::PDGM || m == Method::PDFGM; }

std::optional<double> SolverConfig::delta_at(int k) const {
  if (delta_seq.empty()) return std::nullopt;
  return delta_seq[std::min<std::size_t>(k, delta_seq.size() - 1)];
}

double SolverConfig::delta_tilde_at(int k) const {
  if (delta_tilde_seq.empty()) return 0.0;
  return delta_tilde_seq[std::min<std::size_t>(k, delta_tilde_seq.size() - 1)];
}

double largest_root(double A, double L) {
  if (!(L > 0.0) || !(A >= 0.0)) {
    throw Error(ErrorKind::RejectedInput, "largest_root needs L > 0 and A >= 0");
  }
  return (1.0 + std::sqrt(1.0 + 4.0 * L * A)) / (2.0 * L);
}

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

void check_inputs(const FeasibleSet& set, const SolverConfig& config, const Vector& x0,
                  double L) {
  if (x0.size() == 0 || !x0.allFinite()) throw Error(ErrorKind::RejectedInput, "x0 must be finite and non-empty");
  validate_set(set, x0.size());
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorKind::RejectedInput, "L0 / L must be positive");
  if (config.max_iters < 1) throw Error(ErrorKind::RejectedInput, "max_iters must be positive");
  if (config.line_search_cap < 1) throw Error(ErrorKind::RejectedInput, "line-search cap must be positive");
  for (double d : config.delta_seq) {
    if (!(d >= 0.0)) throw Error(ErrorKind::RejectedInput, "delta_k must be nonnegative");
  }
  for (double d : config.delta_tilde_seq) {
    if (!(d >= 0.0)) throw Error(ErrorKind::RejectedInput, "delta-tilde_k must be nonnegative");
  }
  // Affine rows may be violated at x0; the base set may not.
  const FeasibleSet base = std::holds_alternative<AffineConstrained>(set)
                               ? to_feasible(std::get<AffineConstrained>(set).base)
                               : set;
  if (!contains(base, x0, 1e-10)) {
    throw Error(ErrorKind::RejectedInput, "x0 is not in the feasible set");
  }
}

[[noreturn]] void line_search_exhausted(Method m, int k, int cap, double L) {
  std::ostringstream os;
  os << method_name(m) << ": line search exceeded " << cap << " trials at iteration " << k
     << " (last L = " << L << "); the model assumption looks violated";
  throw Error(ErrorKind::Divergence, os.str());
}

// (alpha v + A x) / (A + alpha) written as x + w (v - x), exact when v == x.
Vector combine(const Vector& x, const Vector& v, double w) { return x + w * (v - x); }

double trial_L(double L, int i, double floor) { return std::max(std::ldexp(L, i - 1), floor); }

double squared_norm(const Geometry& geometry, const Vector& d) {
  const double n = geometry.norm_of(d);
  return n * n;
}

// Bookkeeping shared by every method.
class Recorder {
 public:
  Recorder(Method method, const SolverConfig& config, const Vector& x0, double L0)
      : config_(config), start_(Clock::now()) {
    trace_.method = method;
    trace_.x0 = x0;
    trace_.L0 = L0;
    if (config.epsilon_stop && config.r2_for_stop) {
      if (auto th = theorem_for(method)) {
        std::optional<double> L;
        if (method == Method::GMRelative || method == Method::SFGM) L = L0;
        stop_ = BoundAccumulator(*th, *config.r2_for_stop, L);
      }
    }
  }

  RunTrace& trace() { return trace_; }

  /// Appends the record; returns true when the bound-based stop fires.
  bool push(IterRecord rec, const Vector& x_report, const std::optional<Vector>& xbar_report) {
    if (config_.report_f) {
      rec.f_x = config_.report_f(x_report);
      if (xbar_report) rec.f_bar = config_.report_f(*xbar_report);
    }
    rec.oracle_calls = trace_.oracle_calls;
    if (config_.record_timing) rec.wall_ns = elapsed_ns(start_);
    if (!config_.keep_iterates) {
      rec.x.resize(0);
      rec.y.resize(0);
      rec.u.resize(0);
    }
    bool stop = false;
    if (stop_) {
      const double bound = stop_->add(rec.k, rec.L_next, rec.alpha_next, rec.A_next, rec.delta, rec.delta_tilde);
      stop = bound <= *config_.epsilon_stop;
    }
    trace_.records.push_back(std::move(rec));
    return stop;
  }

  RunTrace finish(Vector x_out, std::optional<Vector> z_out, bool early) {
    trace_.x_out = std::move(x_out);
    trace_.z_out = std::move(z_out);
    trace_.stopped_early = early;
    trace_.wall_ns = config_.record_timing ? elapsed_ns(start_) : 0;
    return std::move(trace_);
  }

 private:
  const SolverConfig& config_;
  Clock::time_point start_;
  RunTrace trace_;
  std::optional<BoundAccumulator> stop_;
};

struct Trial {
  double L = 0.0;
  double alpha = 0.0;
  double A_next = 0.0;
  Vector x, y, u;
  std::optional<Vector> z;
  double delta = 0.0;
  double delta_tilde = 0.0;
  double lhs = 0.0, rhs = 0.0, slack = 0.0;
};

// Gradient-type step shared by GM and PD-GM: model at x_k, subproblem
// centered at x_k with weights (a, b) chosen by the caller.
template <class SolveFn>
RunTrace adaptive_gradient(Method method, ModelOracle& oracle, const Geometry& geometry,
                           const FeasibleSet& set, const SolverConfig& config, const Vector& x0,
                           SolveFn&& solve_step) {
  check_inputs(set, config, x0, config.L0);
  Recorder rec(method, config, x0, config.L0);
  RunTrace& tr = rec.trace();
  Vector x = x0;
  double L = config.L0;
  double A = 0.0;
  Vector weighted_x = Vector::Zero(x0.size());
  std::optional<Vector> weighted_z;
  bool early = false;

  for (int k = 0; k < config.max_iters && !early; ++k) {
    std::optional<Trial> accepted;
    int i = 0;
    for (; i < config.line_search_cap; ++i) {
      Trial t;
      t.L = trial_L(L, i, config.L_floor);
      const ModelEvaluation ev = oracle.query(x);
      ++tr.oracle_calls;
      t.delta = config.delta_at(k).value_or(ev.delta);
      SubproblemSolution sol = solve_step(ev, x, t.L);
      ++tr.inner_trials;
      t.x = std::move(sol.point);
      t.delta_tilde = std::max(config.delta_tilde_at(k), sol.delta_tilde_cert);
      if (sol.dual) t.z = std::move(sol.dual->z);
      const double f_next = oracle.value(t.x);
      ++tr.value_calls;
      t.lhs = f_next;
      t.rhs = ev.f_value + ev.part(t.x) + 0.5 * t.L * squared_norm(geometry, t.x - x) + t.delta;
      t.slack = float_slack(ev.f_value);
      if (t.lhs <= t.rhs + t.slack) {
        accepted = std::move(t);
        break;
      }
    }
    if (!accepted) line_search_exhausted(method, k, config.line_search_cap, L);
    Trial& t = *accepted;
    t.alpha = 1.0 / t.L;
    A += t.alpha;
    weighted_x += t.alpha * t.x;
    if (t.z) {
      if (!weighted_z) weighted_z = Vector::Zero(t.z->size());
      *weighted_z += t.alpha * *t.z;
    }
    const Vector xbar = weighted_x / A;

    IterRecord r;
    r.k = k;
    r.i_k = i;
    r.L_next = t.L;
    r.alpha_next = t.alpha;
    r.A_next = A;
    r.x = t.x;
    r.z = t.z;
    r.delta = t.delta;
    r.delta_tilde = t.delta_tilde;
    r.exit_lhs = t.lhs;
    r.exit_rhs = t.rhs;
    r.exit_slack = t.slack;
    early = rec.push(std::move(r), t.x, xbar);

    x = std::move(t.x);
    L = t.L;
  }
  std::optional<Vector> zbar;
  if (weighted_z) zbar = *weighted_z / A;
  return rec.finish(weighted_x / A, std::move(zbar), early);
}

// Three-sequence accelerated scheme shared by FGM and PD-FGM.
template <class SolveFn>
RunTrace adaptive_fast_gradient(Method method, ModelOracle& oracle, const Geometry& geometry,
                                const FeasibleSet& set, const SolverConfig& config,
                                const Vector& x0, SolveFn&& solve_step) {
  check_inputs(set, config, x0, config.L0);
  Recorder rec(method, config, x0, config.L0);
  RunTrace& tr = rec.trace();
  Vector x = x0;
  Vector u = x0;
  double L = config.L0;
  double A = 0.0;
  std::optional<Vector> weighted_z;
  bool early = false;

  for (int k = 0; k < config.max_iters && !early; ++k) {
    std::optional<Trial> accepted;
    int i = 0;
    for (; i < config.line_search_cap; ++i) {
      Trial t;
      t.L = trial_L(L, i, config.L_floor);
      t.alpha = largest_root(A, t.L);
      t.A_next = A + t.alpha;
      t.y = combine(x, u, t.alpha / t.A_next);
      const ModelEvaluation ev = oracle.query(t.y);
      ++tr.oracle_calls;
      t.delta = config.delta_at(k).value_or(ev.delta);
      SubproblemSolution sol = solve_step(ev, u, t.alpha, t.L);
      ++tr.inner_trials;
      t.u = std::move(sol.point);
      t.delta_tilde = std::max(config.delta_tilde_at(k), sol.delta_tilde_cert);
      if (sol.dual) t.z = std::move(sol.dual->z);
      t.x = combine(x, t.u, t.alpha / t.A_next);
      const double f_next = oracle.value(t.x);
      ++tr.value_calls;
      t.lhs = f_next;
      t.rhs = ev.f_value + ev.part(t.x) + 0.5 * t.L * squared_norm(geometry, t.x - t.y) + t.delta;
      t.slack = float_slack(ev.f_value);
      if (t.lhs <= t.rhs + t.slack) {
        accepted = std::move(t);
        break;
      }
    }
    if (!accepted) line_search_exhausted(method, k, config.line_search_cap, L);
    Trial& t = *accepted;
    A = t.A_next;
    if (t.z) {
      if (!weighted_z) weighted_z = Vector::Zero(t.z->size());
      *weighted_z += t.alpha * *t.z;
    }

    IterRecord r;
    r.k = k;
    r.i_k = i;
    r.L_next = t.L;
    r.alpha_next = t.alpha;
    r.A_next = A;
    r.x = t.x;
    r.y = t.y;
    r.u = t.u;
    r.z = t.z;
    r.delta = t.delta;
    r.delta_tilde = t.delta_tilde;
    r.exit_lhs = t.lhs;
    r.exit_rhs = t.rhs;
    r.exit_slack = t.slack;
    early = rec.push(std::move(r), t.x, std::nullopt);

    x = std::move(t.x);
    u = std::move(t.u);
    L = t.L;
  }
  std::optional<Vector> zbar;
  if (weighted_z) zbar = *weighted_z / A;
  return rec.finish(x, std::move(zbar), early);
}

SubproblemSpec make_spec(const Vector& center, double a, double b, const ModelPart& model,
                         const Geometry& geometry, const FeasibleSet& set) {
  SubproblemSpec spec;
  spec.center = center;
  spec.model_weight = a;
  spec.bregman_weight = b;
  spec.model = model;
  spec.geometry = geometry;
  spec.set = set;
  return spec;
}

void require_strongly_convex(const Geometry& geometry, Method m) {
  if (!geometry.strongly_convex) {
    throw Error(ErrorKind::RejectedInput,
                std::string(method_name(m)) + " needs a prox that is 1-strongly convex w.r.t. the norm");
  }
}

void require_constrained(const FeasibleSet& set, Method m) {
  if (!std::holds_alternative<AffineConstrained>(set)) {
    throw Error(ErrorKind::RejectedInput,
                std::string(method_name(m)) + " needs an affinely constrained feasible set");
  }
}

}  // namespace

RunTrace run_gm_adaptive(ModelOracle& oracle, const Geometry& geometry, const FeasibleSet& set,
                         const SolverConfig& config, const Vector& x0) {
  require_strongly_convex(geometry, Method::GM);
  return adaptive_gradient(Method::GM, oracle, geometry, set, config, x0,
                           [&](const ModelEvaluation& ev, const Vector& x, double L) {
                             return solve(make_spec(x, 1.0 / L, 1.0, ev.part, geometry, set));
                           });
}

RunTrace run_pd_gm(ModelOracle& oracle, const Geometry& geometry, const FeasibleSet& set,
                   const SolverConfig& config, const Vector& x0) {
  require_strongly_convex(geometry, Method::PDGM);
  require_constrained(set, Method::PDGM);
  // phi = psi(., x_k) + L V[x_k]; multipliers come out on the psi scale.
  return adaptive_gradient(Method::PDGM, oracle, geometry, set, config, x0,
                           [&](const ModelEvaluation& ev, const Vector& x, double L) {
                             return argdual(make_spec(x, 1.0, L, ev.part, geometry, set));
                           });
}

RunTrace run_fgm_adaptive(ModelOracle& oracle, const Geometry& geometry, const FeasibleSet& set,
                          const SolverConfig& config, const Vector& x0) {
  require_strongly_convex(geometry, Method::FGM);
  return adaptive_fast_gradient(
      Method::FGM, oracle, geometry, set, config, x0,
      [&](const ModelEvaluation& ev, const Vector& u, double alpha, double) {
        return solve(make_spec(u, alpha, 1.0, ev.part, geometry, set));
      });
}

RunTrace run_pd_fgm(ModelOracle& oracle, const Geometry& geometry, const FeasibleSet& set,
                    const SolverConfig& config, const Vector& x0) {
  require_strongly_convex(geometry, Method::PDFGM);
  require_constrained(set, Method::PDFGM);
  // phi = psi(., y) + (1/alpha) V[u]: the same minimizer as V[u] + alpha psi,
  // with multipliers on the psi scale so z-bar is the alpha-weighted mean.
  return adaptive_fast_gradient(
      Method::PDFGM, oracle, geometry, set, config, x0,
      [&](const ModelEvaluation& ev, const Vector& u, double alpha, double) {
        return argdual(make_spec(u, 1.0, 1.0 / alpha, ev.part, geometry, set));
      });
}

RunTrace run_gm_relative(ModelOracle& oracle, const Geometry& geometry, const FeasibleSet& set,
                         double L, const SolverConfig& config, const Vector& x0) {
  check_inputs(set, config, x0, L);
  Recorder rec(Method::GMRelative, config, x0, L);
  RunTrace& tr = rec.trace();
  tr.L_fixed = L;
  Vector x = x0;
  Vector sum = Vector::Zero(x0.size());
  bool early = false;
  for (int k = 0; k < config.max_iters && !early; ++k) {
    const ModelEvaluation ev = oracle.query(x);
    ++tr.oracle_calls;
    SubproblemSolution sol = solve(make_spec(x, 1.0, L, ev.part, geometry, set));
    ++tr.inner_trials;
    sum += sol.point;
    IterRecord r;
    r.k = k;
    r.L_next = L;
    r.alpha_next = 1.0 / L;
    r.A_next = static_cast<double>(k + 1) / L;
    r.x = sol.point;
    r.delta = config.delta_at(k).value_or(ev.delta);
    r.delta_tilde = std::max(config.delta_tilde_at(k), sol.delta_tilde_cert);
    const Vector xbar = sum / static_cast<double>(k + 1);
    early = rec.push(std::move(r), sol.point, xbar);
    x = std::move(sol.point);
  }
  const double n = static_cast<double>(tr.records.size());
  return rec.finish(sum / n, std::nullopt, early);
}

RunTrace run_sfgm(ModelOracle& oracle, const FeasibleSet& set, double L, const SolverConfig& config,
                  const Vector& x0) {
  check_inputs(set, config, x0, L);
  const Geometry geometry = Geometry::euclidean();
  Recorder rec(Method::SFGM, config, x0, L);
  RunTrace& tr = rec.trace();
  tr.L_fixed = L;
  const auto* mb = dynamic_cast<const MiniBatchOracle*>(&oracle);
  Vector x = x0;
  Vector u = x0;
  double A = 0.0;
  bool early = false;
  for (int k = 0; k < config.max_iters && !early; ++k) {
    const double alpha = largest_root(A, L);
    const double A_next = A + alpha;
    Vector y = combine(x, u, alpha / A_next);
    const ModelEvaluation ev = oracle.query(y);
    ++tr.oracle_calls;
    SubproblemSolution sol = solve(make_spec(u, alpha, 1.0, ev.part, geometry, set));
    ++tr.inner_trials;
    Vector x_next = combine(x, sol.point, alpha / A_next);
    A = A_next;

    IterRecord r;
    r.k = k;
    r.L_next = L;
    r.alpha_next = alpha;
    r.A_next = A;
    r.x = x_next;
    r.y = std::move(y);
    r.u = sol.point;
    r.delta = config.delta_at(k).value_or(ev.delta);
    r.delta_tilde = config.delta_tilde_at(k);
    if (mb) {
      r.m_batch = static_cast<std::int64_t>(mb->batch());
      tr.samples += r.m_batch.value();
    }
    early = rec.push(std::move(r), x_next, std::nullopt);
    x = std::move(x_next);
    u = std::move(sol.point);
  }
  return rec.finish(x, std::nullopt, early);
}

RunTrace run_heuristic_asfgm(const StochasticSampler& sampler, const FeasibleSet& set,
                             const SolverConfig& config, const Vector& x0) {
  check_inputs(set, config, x0, config.L0);
  if (!(config.eps > 0.0) || !(config.sigma0_sq > 0.0)) {
    throw Error(ErrorKind::RejectedInput, "asfgm needs eps > 0 and sigma0^2 > 0");
  }
  const Geometry geometry = Geometry::euclidean();
  StochasticSampler seeded = sampler;
  if (config.seed) seeded.seed = *config.seed;

  Recorder rec(Method::ASFGM, config, x0, config.L0);
  RunTrace& tr = rec.trace();
  Vector x = x0;
  Vector u = x0;
  double L = config.L0;
  double A = 0.0;
  for (int k = 0; k < config.max_iters; ++k) {
    const double alpha_guess = largest_root(A, L);
    const double m_real = std::ceil(3.0 * config.sigma0_sq * alpha_guess / config.eps);
    if (!(m_real <= 1e9)) {
      throw Error(ErrorKind::Divergence, "asfgm: mini-batch size exceeds 1e9 samples");
    }
    const auto m = static_cast<std::size_t>(std::max(1.0, m_real));
    // One mini-batch per iteration, drawn before the first trial and reused
    // by every trial of this iteration.
    const MiniBatch batch = draw_minibatch(seeded, m, static_cast<std::uint64_t>(k));
    tr.samples += static_cast<std::int64_t>(m);

    std::optional<Trial> accepted;
    int i = 0;
    for (; i < config.line_search_cap; ++i) {
      Trial t;
      t.L = trial_L(L, i, config.L_floor);
      t.alpha = largest_root(A, t.L);
      t.A_next = A + t.alpha;
      t.y = combine(x, u, t.alpha / t.A_next);
      const double fy = batch.value(t.y);
      Vector gy = batch.gradient(t.y);
      ++tr.oracle_calls;
      if (!std::isfinite(fy) || !gy.allFinite()) {
        throw Error(ErrorKind::Evaluation, "asfgm: non-finite mini-batch value or gradient at " + format_vector(t.y));
      }
      const ModelPart part = ModelPart::linear(t.y, gy);
      SubproblemSolution sol = solve(make_spec(u, t.alpha, 1.0, part, geometry, set));
      ++tr.inner_trials;
      t.u = std::move(sol.point);
      t.x = combine(x, t.u, t.alpha / t.A_next);
      t.lhs = batch.value(t.x);
      ++tr.value_calls;
      t.delta = config.eps / (t.L * t.alpha);
      t.rhs = fy + part(t.x) + 0.5 * t.L * (t.x - t.y).squaredNorm() + t.delta;
      t.slack = float_slack(fy);
      if (t.lhs <= t.rhs + t.slack) {
        accepted = std::move(t);
        break;
      }
    }
    if (!accepted) line_search_exhausted(Method::ASFGM, k, config.line_search_cap, L);
    Trial& t = *accepted;
    A = t.A_next;

    IterRecord r;
    r.k = k;
    r.i_k = i;
    r.L_next = t.L;
    r.alpha_next = t.alpha;
    r.A_next = A;
    r.x = t.x;
    r.y = t.y;
    r.u = t.u;
    r.m_batch = static_cast<std::int64_t>(m);
    r.delta = t.delta;
    r.exit_lhs = t.lhs;
    r.exit_rhs = t.rhs;
    r.exit_slack = t.slack;
    rec.push(std::move(r), t.x, std::nullopt);

    x = std::move(t.x);
    u = std::move(t.u);
    L = t.L;
  }
  return rec.finish(x, std::nullopt, false);
}

}  // namespace modelopt
