#include <gtest/gtest.h>

#include <cmath>

#include "modelopt/bench.hpp"
#include "modelopt/problems.hpp"
#include "modelopt/solvers.hpp"

using namespace modelopt;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// f(x) = 1/2 sum d_i (x_i - a_i)^2
struct Quadratic {
  Vector d, a;
  double operator()(const Vector& x) const { return 0.5 * (d.array() * (x - a).array().square()).sum(); }
  Vector grad(const Vector& x) const { return (d.array() * (x - a).array()).matrix(); }
  OraclePtr oracle() const {
    auto self = *this;
    return smooth_model([self](const Vector& x) { return self(x); }, [self](const Vector& x) { return self.grad(x); });
  }
  double L() const { return d.maxCoeff(); }
};

Quadratic ill_conditioned(int n, double kappa) {
  Quadratic q;
  q.d.resize(n);
  for (int i = 0; i < n; ++i) q.d[i] = std::pow(kappa, -static_cast<double>(i) / (n - 1));
  q.a = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  return q;
}

SolverConfig config_for(int iters, double L0, std::function<double(const Vector&)> f = {}) {
  SolverConfig c;
  c.max_iters = iters;
  c.L0 = L0;
  c.report_f = std::move(f);
  c.record_timing = false;
  return c;
}

Vector zbar_at(const RunTrace& tr, int k) {
  Vector s = Vector::Zero(tr.records[0].z->size());
  for (int j = 0; j <= k; ++j) s += tr.records[j].alpha_next * *tr.records[j].z;
  return s / tr.records[k].A_next;
}

Vector xbar_at(const RunTrace& tr, int k) {
  Vector s = Vector::Zero(tr.records[0].x.size());
  for (int j = 0; j <= k; ++j) s += tr.records[j].alpha_next * tr.records[j].x;
  return s / tr.records[k].A_next;
}

}  // namespace

TEST(LargestRoot, Examples) {
  EXPECT_EQ(largest_root(0, 1), 1.0);
  EXPECT_NEAR(largest_root(1, 1), (1 + std::sqrt(5.0)) / 2, 1e-15);
  EXPECT_EQ(largest_root(3, 2), 1.5);
  EXPECT_THROW(largest_root(1, 0), Error);
}

TEST(LargestRootProperty, SolvesTheQuadratic) {
  for (double A : {0.0, 1e-8, 0.3, 17.0, 1e6}) {
    for (double L : {1e-6, 0.5, 3.0, 1e8}) {
      const double a = largest_root(A, L);
      EXPECT_NEAR(L * a * a, A + a, 1e-12 * (A + a));
      EXPECT_GT(a, 0.0);
    }
  }
}

TEST(GradientMethod, OneStepOnUnitQuadratic) {
  Quadratic q{vec({1, 1}), vec({1, 0})};
  const auto tr = run_gm_adaptive(*q.oracle(), Geometry::euclidean(), WholeSpace{}, config_for(1, 2.0, q), vec({0, 0}));
  ASSERT_EQ(tr.iterations(), 1);
  EXPECT_EQ(tr.records[0].i_k, 0);
  EXPECT_EQ(tr.records[0].L_next, 1.0);
  EXPECT_EQ(tr.records[0].x, vec({1, 0}));
  EXPECT_EQ(tr.records[0].exit_lhs, tr.records[0].exit_rhs);
  EXPECT_EQ(tr.records[0].f_bar, 0.0);
}

TEST(GradientMethod, RateEnvelope) {
  const auto q = ill_conditioned(10, 100);
  const double r2 = 0.5 * q.a.squaredNorm();
  const auto tr = run_gm_adaptive(*q.oracle(), Geometry::euclidean(), WholeSpace{}, config_for(300, 1.0, q),
                                  Vector::Zero(10));
  const auto bound = theoretical_bound(tr, r2, Theorem::GM);
  for (int k = 0; k < tr.iterations(); ++k) {
    const double gap = tr.records[k].f_bar;
    EXPECT_LE(gap, 2 * q.L() * r2 / (k + 1) + 1e-12) << k;
    EXPECT_LE(gap, bound.per_iteration[k] + 1e-12) << k;
    EXPECT_EQ(tr.records[k].alpha_next, 1.0 / tr.records[k].L_next);
  }
  EXPECT_TRUE(tr.x_out.isApprox(xbar_at(tr, tr.iterations() - 1), 1e-14));
}

TEST(GradientMethod, FixedPoint) {
  Quadratic q{vec({2, 0.5}), vec({0.3, -1})};
  const auto gm = run_gm_adaptive(*q.oracle(), Geometry::euclidean(), WholeSpace{}, config_for(20, 1.0, q), q.a);
  const auto fgm = run_fgm_adaptive(*q.oracle(), Geometry::euclidean(), WholeSpace{}, config_for(20, 1.0, q), q.a);
  for (const auto* tr : {&gm, &fgm}) {
    for (const auto& r : tr->records) EXPECT_EQ(r.x, q.a);
  }
}

TEST(GradientMethod, LineSearchCapIsADivergenceError) {
  // Gradient with the wrong sign: no L below 2^60 satisfies the exit test.
  auto bad = smooth_model([](const Vector& x) { return 1e12 * x[0]; },
                          [](const Vector&) -> Vector { return vec({-1e12}); });
  try {
    run_gm_adaptive(*bad, Geometry::euclidean(), WholeSpace{}, config_for(5, 1.0), vec({0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Divergence);
    EXPECT_NE(std::string(e.what()).find("iteration 0"), std::string::npos);
  }
}

TEST(GradientMethod, RejectsRelaxedGeometry) {
  Quadratic q{vec({1}), vec({0})};
  EXPECT_THROW(run_gm_adaptive(*q.oracle(), Geometry::euclidean().relaxed(), WholeSpace{}, config_for(1, 1.0), vec({1})),
               Error);
}

TEST(FastGradientMethod, BeatsGradientMethodAndMeetsEnvelope) {
  const auto q = ill_conditioned(10, 100);
  const double r2 = 0.5 * q.a.squaredNorm();
  const auto cfg = config_for(50, 1.0, q);
  const auto gm = run_gm_adaptive(*q.oracle(), Geometry::euclidean(), WholeSpace{}, cfg, Vector::Zero(10));
  const auto fgm = run_fgm_adaptive(*q.oracle(), Geometry::euclidean(), WholeSpace{}, cfg, Vector::Zero(10));
  double maxL = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto& r = fgm.records[k];
    maxL = std::max(maxL, r.L_next);
    EXPECT_LE(r.f_x, 8 * q.L() * r2 / ((k + 2.0) * (k + 2.0)) + 1e-12) << k;
    EXPECT_GE(r.A_next, (k + 2.0) * (k + 2.0) / (8 * maxL) * (1 - 1e-12)) << k;
    EXPECT_NEAR(r.L_next * r.alpha_next * r.alpha_next, r.A_next, 1e-9 * r.A_next);
  }
  EXPECT_LT(fgm.records.back().f_x, gm.records.back().f_bar);
  EXPECT_EQ(fgm.x_out, fgm.records.back().x);
}

TEST(FastGradientMethod, ConstantDeltaEnvelope) {
  const auto q = ill_conditioned(5, 10);
  const double r2 = 0.5 * q.a.squaredNorm();
  const double delta = 1e-4;
  auto cfg = config_for(200, 1.0, q);
  cfg.delta_seq = {delta};
  const auto tr = run_fgm_adaptive(*q.oracle(), Geometry::euclidean(), WholeSpace{}, cfg, Vector::Zero(5));
  const auto b = theoretical_bound(tr, r2, Theorem::FGM);
  double weighted = 0.0;
  for (int k = 0; k < tr.iterations(); ++k) {
    weighted += tr.records[k].A_next;
    EXPECT_LE(tr.records[k].f_x, b.per_iteration[k] + 1e-12);
  }
  EXPECT_NEAR(b.delta_term, 2 * delta * weighted / tr.A_N(), 1e-12 * b.delta_term);
  EXPECT_NEAR(b.main_term, r2 / tr.A_N(), 1e-15);
  EXPECT_NEAR(b.total(), b.per_iteration.back(), 1e-15);
}

TEST(RelativeGradientMethod, EuclideanReducesToGradientStep) {
  Quadratic q{vec({1, 1}), vec({1, 0})};
  const auto tr = run_gm_relative(*q.oracle(), Geometry::euclidean().relaxed(), WholeSpace{}, 1.0,
                                  config_for(3, 1.0, q), vec({0, 0}));
  EXPECT_EQ(tr.records[0].x, vec({1, 0}));
  EXPECT_EQ(tr.oracle_calls, 3);
}

TEST(RelativeGradientMethod, SimplexEnvelopeAndScaling) {
  const auto p = build_problem("simplex-linear-entropy");
  const double L = p.true_L;
  auto cfg = config_for(400, L, p.f);
  const auto tr = run_gm_relative(*p.oracle, p.geometry.relaxed(), p.set, L, cfg, p.x0);
  const double r2 = bregman(p.geometry, p.x0, *p.x_star);
  EXPECT_NEAR(r2, std::log(static_cast<double>(p.dim)), 1e-12);
  const auto b = theoretical_bound(tr, r2, Theorem::GMRelative);
  for (int k = 0; k < tr.iterations(); ++k) {
    EXPECT_LE(tr.records[k].f_bar - p.f_star, L * r2 / (k + 1) + 1e-10) << k;
    EXPECT_NEAR(b.per_iteration[k], L * r2 / (k + 1), 1e-13);
    EXPECT_TRUE(contains(p.set, tr.records[k].x, 1e-10));
  }
  EXPECT_NEAR(b.per_iteration[399] * 4, b.per_iteration[99], 1e-14);
}

TEST(PrimalDualGradient, ProjectionQpConverges) {
  const auto p = build_problem("projection-qp");
  const auto tr = run_pd_gm(*p.oracle, p.geometry, p.set, config_for(300, 1.0, p.f), p.x0);
  ASSERT_TRUE(tr.z_out.has_value());
  for (int k = 0; k < tr.iterations(); ++k) {
    const double gap = p.f(xbar_at(tr, k)) + eval_dual(p, zbar_at(tr, k));
    EXPECT_GE(gap, -1e-8) << k;
    const double r2_hat = bregman(p.geometry, p.x0, p.dual->maximizer(zbar_at(tr, k)));
    EXPECT_LE(gap, r2_hat / tr.records[k].A_next + 1e-10) << k;
  }
  EXPECT_NEAR(tr.x_out[0], 1.0, 1e-6);
  EXPECT_NEAR(tr.x_out[1], 0.0, 1e-12);
  EXPECT_NEAR((*tr.z_out)[0], 1.0, 1e-6);
}

TEST(PrimalDualGradient, InactiveConstraintMatchesGradientMethod) {
  Quadratic q{vec({1, 3}), vec({2, 0.5})};
  AffineConstraints rows;
  rows.B = Matrix::Constant(1, 2, 0.0);
  rows.B(0, 0) = -1;
  rows.c = vec({-1});
  rows.sense = {Sense::LessEqual};
  const FeasibleSet set = AffineConstrained{WholeSpace{}, rows};
  const auto pd = run_pd_gm(*q.oracle(), Geometry::euclidean(), set, config_for(30, 1.0, q), vec({1, 0}));
  const auto gm = run_gm_adaptive(*q.oracle(), Geometry::euclidean(), WholeSpace{}, config_for(30, 1.0, q), vec({1, 0}));
  for (int k = 0; k < 30; ++k) {
    EXPECT_LE((pd.records[k].x - gm.records[k].x).norm(), 1e-14) << k;
    EXPECT_EQ(pd.records[k].L_next, gm.records[k].L_next);
  }
  EXPECT_EQ((*pd.z_out)[0], 0.0);
  const auto pdf = run_pd_fgm(*q.oracle(), Geometry::euclidean(), set, config_for(30, 1.0, q), vec({1, 0}));
  const auto fgm = run_fgm_adaptive(*q.oracle(), Geometry::euclidean(), WholeSpace{}, config_for(30, 1.0, q), vec({1, 0}));
  for (int k = 0; k < 30; ++k) EXPECT_LE((pdf.records[k].x - fgm.records[k].x).norm(), 1e-13) << k;
}

TEST(PrimalDualFastGradient, GapTimesAIsBounded) {
  const auto p = build_problem("projection-qp");
  const auto tr = run_pd_fgm(*p.oracle, p.geometry, p.set, config_for(200, 1.0, p.f), p.x0);
  const Vector zN = *tr.z_out;
  const double r2_hat = bregman(p.geometry, p.x0, p.dual->maximizer(zN));
  for (int k = 0; k < tr.iterations(); ++k) {
    const double gap = tr.records[k].f_x + eval_dual(p, zbar_at(tr, k));
    EXPECT_GE(gap, -1e-8) << k;
    EXPECT_LE(gap * tr.records[k].A_next, 10 * r2_hat + 1e-10) << k;
  }
  EXPECT_TRUE(zbar_at(tr, tr.iterations() - 1).isApprox(zN, 1e-14));
}

TEST(PrimalDualFastGradient, TransportToyReachesFeasibility) {
  const auto p = build_problem("transport-toy");
  const auto tr = run_pd_fgm(*p.oracle, p.geometry, p.set, config_for(1000, 1.0, p.f), p.x0);
  const auto& rows = std::get<AffineConstrained>(p.set).constraints;
  EXPECT_LE(rows.violation(tr.x_out), 1e-6);
  EXPECT_LE(tr.records.back().f_x + eval_dual(p, *tr.z_out), 1e-6);
  EXPECT_LE((tr.x_out - *p.x_star).norm(), 1e-4);
}

TEST(PrimalDual, RequiresConstraints) {
  Quadratic q{vec({1}), vec({0})};
  EXPECT_THROW(run_pd_gm(*q.oracle(), Geometry::euclidean(), WholeSpace{}, config_for(1, 1.0), vec({1})), Error);
}

TEST(StochasticFastGradient, ZeroNoiseMatchesReferenceFgm) {
  auto p = build_problem("stochastic-quadratic", {{"sigma", "0"}, {"n", "3"}});
  const double L = p.true_L;
  auto stoch = make_minibatch_oracle(p, 1, 5);
  const auto s = run_sfgm(*stoch, p.set, L, config_for(40, L, p.f), p.x0);
  const auto d = run_sfgm(*p.oracle, p.set, L, config_for(40, L, p.f), p.x0);
  // Independent fixed-L fast gradient method.
  Vector x = p.x0, u = p.x0;
  double A = 0.0;
  for (int k = 0; k < 40; ++k) {
    const double a = (1.0 + std::sqrt(1.0 + 4.0 * L * A)) / (2.0 * L);
    const Vector y = (a * u + A * x) / (A + a);
    u = u - a * p.oracle->query(y).part.g;
    x = (a * u + A * x) / (A + a);
    A += a;
    EXPECT_EQ(s.records[k].x, d.records[k].x);
    EXPECT_LE((d.records[k].x - x).norm(), 1e-13 * (1 + x.norm())) << k;
    EXPECT_EQ(s.records[k].m_batch, 1);
  }
  const double r2 = 0.5 * (p.x0 - *p.x_star).squaredNorm();
  for (int k = 0; k < 40; ++k) {
    const double n = k + 1.0;
    EXPECT_LE(d.records[k].f_x - p.f_star, 4 * L * r2 / (n * n) + 1e-12);
  }
}

TEST(StochasticFastGradient, SeededRunsAreBitReproducible) {
  const auto p = build_problem("stochastic-quadratic");
  auto a = make_minibatch_oracle(p, 4, 11);
  auto b = make_minibatch_oracle(p, 4, 11);
  const auto ta = run_sfgm(*a, p.set, p.true_L, config_for(50, p.true_L, p.f), p.x0);
  const auto tb = run_sfgm(*b, p.set, p.true_L, config_for(50, p.true_L, p.f), p.x0);
  for (int k = 0; k < 50; ++k) EXPECT_EQ(ta.records[k].x, tb.records[k].x);
  EXPECT_EQ(ta.samples, 200);
}

TEST(AdaptiveStochastic, BatchRuleMatchesTrace) {
  const auto p = build_problem("logistic-synthetic");
  auto cfg = config_for(40, 1.0, p.f);
  cfg.eps = 1e-2;
  cfg.sigma0_sq = 0.1;
  cfg.seed = 3;
  const auto tr = run_heuristic_asfgm(*p.sampler, p.set, cfg, p.x0);
  double A = 0.0, L = cfg.L0;
  std::int64_t total = 0;
  for (const auto& r : tr.records) {
    const double alpha_tilde = (1.0 + std::sqrt(1.0 + 4.0 * L * A)) / (2.0 * L);
    const auto m = static_cast<std::int64_t>(std::ceil(3 * cfg.sigma0_sq * alpha_tilde / cfg.eps));
    ASSERT_TRUE(r.m_batch.has_value());
    EXPECT_EQ(*r.m_batch, std::max<std::int64_t>(1, m)) << r.k;
    EXPECT_LE(r.exit_lhs, r.exit_rhs + r.exit_slack);
    total += *r.m_batch;
    A = r.A_next;
    L = r.L_next;
  }
  EXPECT_EQ(tr.samples, total);
  const auto again = run_heuristic_asfgm(*p.sampler, p.set, cfg, p.x0);
  EXPECT_EQ(again.x_out, tr.x_out);
}

TEST(AdaptiveStochastic, DeterministicDegeneracyMatchesFgm) {
  auto p = build_problem("stochastic-quadratic", {{"sigma", "0"}});
  auto cfg = config_for(60, 0.3, p.f);
  cfg.eps = 1e-30;
  cfg.sigma0_sq = 1e-40;
  const auto as = run_heuristic_asfgm(*p.sampler, p.set, cfg, p.x0);
  const auto fg = run_fgm_adaptive(*p.oracle, p.geometry, p.set, cfg, p.x0);
  for (int k = 0; k < 60; ++k) {
    EXPECT_EQ(*as.records[k].m_batch, 1);
    EXPECT_EQ(as.records[k].L_next, fg.records[k].L_next) << k;
    EXPECT_LE((as.records[k].x - fg.records[k].x).norm(), 1e-14) << k;
  }
}

TEST(SolverInvariants, RecurrencesExitTestsFeasibilityAndEconomy) {
  for (const auto& entry : default_suite()) {
    const auto m = entry.request.method;
    if (m == Method::SFGM || m == Method::ASFGM) continue;
    const auto p = build_problem(entry.problem, entry.params);
    const auto rep = run_benchmark(p, entry.request);
    const auto& tr = rep.trace;
    const std::string tag = entry.problem + "/" + method_name(m);
    double A = 0.0;
    for (const auto& r : tr.records) {
      EXPECT_EQ(r.A_next, A + r.alpha_next) << tag;
      A = r.A_next;
      if (m == Method::FGM || m == Method::PDFGM) {
        EXPECT_LE(std::abs(r.L_next * r.alpha_next * r.alpha_next - r.A_next), 1e-9 * r.A_next) << tag;
      } else {
        EXPECT_EQ(r.alpha_next, 1.0 / r.L_next) << tag;
      }
      if (m != Method::GMRelative) EXPECT_LE(r.exit_lhs, r.exit_rhs + r.exit_slack) << tag;
      const FeasibleSet base = p.constrained() ? to_feasible(std::get<AffineConstrained>(p.set).base) : p.set;
      for (const Vector* v : {&r.x, &r.y, &r.u}) {
        if (v->size() > 0) EXPECT_TRUE(contains(base, *v, 1e-10)) << tag;
      }
    }
    const double N = tr.iterations();
    const double Lfinal = tr.records.back().L_next;
    EXPECT_LE(tr.oracle_calls, 2 * N + std::log2(Lfinal / tr.L0) + 2) << tag;
    EXPECT_TRUE(rep.passed) << tag;
    for (double g : rep.duality_gap) EXPECT_GE(g, -1e-8) << tag;
  }
}

TEST(Bounds, GradientMethodConstantL) {
  RunTrace tr;
  tr.method = Method::GM;
  double A = 0.0;
  for (int k = 0; k < 8; ++k) {
    IterRecord r;
    r.k = k;
    r.L_next = 4.0;
    r.alpha_next = 0.25;
    A += 0.25;
    r.A_next = A;
    tr.records.push_back(r);
  }
  const auto b = theoretical_bound(tr, 2.0, Theorem::GM);
  for (int k = 0; k < 8; ++k) EXPECT_DOUBLE_EQ(b.per_iteration[k], 4.0 * 2.0 / (k + 1));
  EXPECT_EQ(b.delta_term, 0.0);
  EXPECT_EQ(b.delta_tilde_term, 0.0);
}

TEST(Bounds, MismatchedTheoremIsRejected) {
  RunTrace tr;
  tr.method = Method::FGM;
  tr.records.resize(1);
  tr.records[0].L_next = 1.0;
  tr.records[0].alpha_next = 1.0;
  tr.records[0].A_next = 1.0;
  try {
    theoretical_bound(tr, 1.0, Theorem::GM);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RejectedInput);
  }
}

TEST(Bounds, SequencesAndBreakdown) {
  RunTrace tr;
  tr.method = Method::GM;
  const std::vector<double> L = {1, 2, 2, 4};
  double A = 0.0;
  for (int k = 0; k < 4; ++k) {
    IterRecord r;
    r.k = k;
    r.L_next = L[k];
    r.alpha_next = 1.0 / L[k];
    A += r.alpha_next;
    r.A_next = A;
    tr.records.push_back(r);
  }
  BoundInputs in;
  in.delta_seq = {0.1, 0.2};
  in.delta_tilde_seq = {0.01};
  const auto b = theoretical_bound(tr, 1.0, Theorem::GM, in);
  // R^2/A + sum dt/A + 2 sum alpha delta / A
  const double A4 = 1 + 0.5 + 0.5 + 0.25;
  EXPECT_NEAR(b.main_term, 1.0 / A4, 1e-15);
  EXPECT_NEAR(b.delta_tilde_term, 0.04 / A4, 1e-15);
  EXPECT_NEAR(b.delta_term, 2 * (1 * 0.1 + 0.5 * 0.2 + 0.5 * 0.2 + 0.25 * 0.2) / A4, 1e-15);
  EXPECT_NEAR(b.total(), b.per_iteration.back(), 1e-15);
  EXPECT_GE(b.main_term, 0.0);
}

TEST(Bounds, BoundBasedStopping) {
  const auto q = ill_conditioned(5, 10);
  auto cfg = config_for(10000, 1.0, q);
  cfg.epsilon_stop = 1e-4;
  cfg.r2_for_stop = 0.5 * q.a.squaredNorm();
  const auto tr = run_fgm_adaptive(*q.oracle(), Geometry::euclidean(), WholeSpace{}, cfg, Vector::Zero(5));
  EXPECT_TRUE(tr.stopped_early);
  const auto b = theoretical_bound(tr, *cfg.r2_for_stop, Theorem::FGM);
  EXPECT_LE(b.total(), 1e-4);
  EXPECT_GT(b.per_iteration[b.per_iteration.size() - 2], 1e-4);
}
