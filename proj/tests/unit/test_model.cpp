#include <gtest/gtest.h>

#include <random>

#include "modelopt/builders.hpp"
#include "modelopt/subproblem.hpp"

using namespace modelopt;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::vector<std::pair<Vector, Vector>> random_pairs(int count, Eigen::Index n, double lo, double hi,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::pair<Vector, Vector>> pairs;
  for (int t = 0; t < count; ++t) {
    Vector x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
    }
    pairs.emplace_back(x, y);
  }
  return pairs;
}

double half_sq(const Vector& x) { return 0.5 * x.squaredNorm(); }

}  // namespace

TEST(ModelInequality, QuadraticAttainsUpperBound) {
  auto oracle = smooth_model(half_sq, [](const Vector& x) -> Vector { return x; });
  const auto rep = check_model_inequality(half_sq, *oracle, 1.0, Geometry::euclidean(),
                                          {{vec({1, 0}), vec({0, 0})}}, InequalityKind::NormModel);
  ASSERT_EQ(rep.pairs.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.pairs[0].lower, 0.5);
  EXPECT_DOUBLE_EQ(rep.pairs[0].slack, 0.0);
  EXPECT_EQ(rep.violations, 0u);
}

TEST(ModelInequality, EqualPairGivesZeroResidualAndDeltaSlack) {
  auto oracle = holder_model([](const Vector& x) { return x.lpNorm<1>(); },
                             [](const Vector& x) -> Vector { return x.array().sign().matrix(); },
                             HolderSpec{2.0, 0.0, 0.1});
  const Vector p = vec({0.3});
  const auto rep = check_model_inequality([](const Vector& x) { return x.lpNorm<1>(); }, *oracle, 10.0,
                                          Geometry::euclidean(), {{p, p}}, InequalityKind::NormModel);
  EXPECT_EQ(rep.pairs[0].lower, 0.0);
  EXPECT_DOUBLE_EQ(rep.pairs[0].slack, 0.1);
}

TEST(ModelInequality, CompositeModelHasNoViolations) {
  auto g = half_sq;
  auto oracle = composite_model(g, [](const Vector& x) -> Vector { return x; }, SimpleConvexFn::l1(1.0));
  auto f = [](const Vector& x) { return 0.5 * x.squaredNorm() + x.lpNorm<1>(); };
  // Brute force: both sides evaluated independently of the checker.
  const auto pairs = random_pairs(100, 2, -1.0, 1.0, 5);
  const auto rep = check_model_inequality(f, *oracle, 1.0, Geometry::euclidean(), pairs, InequalityKind::NormModel);
  EXPECT_EQ(rep.violations, 0u);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    const double lower = f(x) - f(y) - (y.dot(x - y) + x.lpNorm<1>() - y.lpNorm<1>());
    EXPECT_NEAR(rep.pairs[i].lower, lower, 1e-14);
    EXPECT_GE(lower, -1e-14);
    EXPECT_LE(lower, 0.5 * (x - y).squaredNorm() + 1e-14);
  }
}

TEST(ModelInequality, FlagsAWrongL) {
  auto oracle = smooth_model(half_sq, [](const Vector& x) -> Vector { return x; });
  const auto rep = check_model_inequality(half_sq, *oracle, 0.5, Geometry::euclidean(),
                                          random_pairs(20, 2, -1.0, 1.0, 6), InequalityKind::NormModel);
  EXPECT_GT(rep.violations, 0u);
}

TEST(ModelInequality, BregmanKindOnSimplexForLinear) {
  const Vector c = vec({0.3, 0.1, 0.7});
  auto f = [c](const Vector& x) { return c.dot(x); };
  auto oracle = smooth_model(f, [c](const Vector&) -> Vector { return c; });
  std::vector<std::pair<Vector, Vector>> pairs = {{vec({0.2, 0.3, 0.5}), vec({0.6, 0.2, 0.2})}};
  const auto rep = check_model_inequality(f, *oracle, 1.0, Geometry::entropy_simplex(), pairs,
                                          InequalityKind::BregmanModel);
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_NEAR(rep.pairs[0].lower, 0.0, 1e-15);
}

TEST(ModelPartProperty, VanishesAtAnchorAndIsConvex) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    Vector y(3), g(3), x1(3), x2(3), p1(3), p2(3), yp(3);
    for (int i = 0; i < 3; ++i) {
      y[i] = u(rng), g[i] = u(rng), x1[i] = u(rng), x2[i] = u(rng);
      p1[i] = pos(rng), p2[i] = pos(rng), yp[i] = pos(rng);
    }
    const double s = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const ModelPart lin = ModelPart::linear(y, g);
    const ModelPart l1 = ModelPart::linear_plus_simple(y, g, SimpleConvexFn::l1(0.7));
    const ModelPart ent = ModelPart::linear_plus_simple(yp, g, SimpleConvexFn::neg_entropy(0.3));
    EXPECT_EQ(lin(y), 0.0);
    EXPECT_EQ(l1(y), 0.0);
    EXPECT_EQ(ent(yp), 0.0);
    for (const ModelPart* m : {&lin, &l1}) {
      EXPECT_LE((*m)(s * x1 + (1 - s) * x2), s * (*m)(x1) + (1 - s) * (*m)(x2) + 1e-12);
    }
    EXPECT_LE(ent(s * p1 + (1 - s) * p2), s * ent(p1) + (1 - s) * ent(p2) + 1e-12);
  }
}

TEST(OraclePurity, DeterministicQueriesAreBitIdentical) {
  auto oracle = composite_model([](const Vector& x) { return std::exp(x.sum()); },
                                [](const Vector& x) -> Vector { return Vector::Constant(x.size(), std::exp(x.sum())); },
                                SimpleConvexFn::l1(0.5));
  const Vector y = vec({0.1, -0.4});
  const auto a = oracle->query(y);
  const auto b = oracle->query(y);
  EXPECT_EQ(a.f_value, b.f_value);
  EXPECT_EQ(a.part.g, b.part.g);
  EXPECT_EQ(a.part.base_value, b.part.base_value);
  EXPECT_EQ(a.delta, b.delta);
}

TEST(InexactSolution, ExactUnconstrainedMinimizerHasZeroWitness) {
  SubproblemSpec spec;
  spec.center = vec({1, 2});
  spec.model = ModelPart::linear(vec({0, 0}), vec({0.5, -1}));
  spec.model_weight = 2.0;
  spec.bregman_weight = 1.0;
  spec.set = WholeSpace{};
  const Vector x = spec.center - spec.model_weight * spec.model.g;
  const auto chk = verify_inexact_solution(spec, x, 0.0);
  EXPECT_TRUE(chk.accepted);
  EXPECT_NEAR(chk.witness.norm(), 0.0, 1e-15);
}

TEST(InexactSolution, PerturbedBoxSolutionIsRejected) {
  SubproblemSpec spec;
  spec.center = vec({0.5, 0.5});
  spec.model = ModelPart::linear(vec({0, 0}), vec({0.2, -0.1}));
  spec.set = make_box(vec({0, 0}), vec({1, 1}));
  const Vector exact = solve(spec).point;
  const Vector h = spec.model.g + (exact - spec.center);  // zero at the interior optimum
  const Vector bad = exact + 1e-3 * spec.model.g.normalized();
  const auto chk = verify_inexact_solution(spec, bad, 0.0);
  EXPECT_FALSE(chk.accepted);
  // Independent evaluation: h at bad is 1e-3 * unit(g); its minimum over the box.
  const Vector hb = spec.model.g + (bad - spec.center);
  double expected = 0.0;
  for (int i = 0; i < 2; ++i) expected += hb[i] > 0 ? hb[i] * (0.0 - bad[i]) : hb[i] * (1.0 - bad[i]);
  EXPECT_NEAR(chk.min_inner, expected, 1e-14);
  EXPECT_NEAR(h.norm(), 0.0, 1e-15);
}

TEST(InexactSolution, SimplexVertexMinimizesLinear) {
  SubproblemSpec spec;
  spec.center = vec({1, 0, 0});
  spec.model = ModelPart::linear(vec({1, 0, 0}), vec({1, 2, 3}));
  spec.model_weight = 1.0;
  spec.bregman_weight = 1e-12;
  spec.set = Simplex{3};
  spec.geometry = Geometry::euclidean();
  EXPECT_TRUE(verify_inexact_solution(spec, vec({1, 0, 0}), 0.0).accepted);
}

TEST(InexactSolution, AffineSetsAreUnsupported) {
  SubproblemSpec spec;
  spec.center = vec({0, 0});
  spec.model = ModelPart::linear(vec({0, 0}), vec({0, 0}));
  AffineConstraints c;
  c.B = Matrix::Ones(1, 2);
  c.c = vec({1});
  c.sense = {Sense::Equal};
  spec.set = AffineConstrained{WholeSpace{}, c};
  try {
    verify_inexact_solution(spec, vec({0.5, 0.5}), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Capability);
  }
}
