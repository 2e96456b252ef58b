#include "modelopt/model.hpp"

#include <limits>

namespace modelopt {

double SimpleConvexFn::operator()(const Vector& x) const {
  switch (kind) {
    case Kind::L1:
      return scale * x.lpNorm<1>();
    case Kind::NegEntropy: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] < 0.0) return std::numeric_limits<double>::infinity();
        if (x[i] > 0.0) s += x[i] * std::log(x[i]);
      }
      return scale * s;
    }
  }
  return 0.0;
}

std::pair<double, double> SimpleConvexFn::subgradient_interval(double xi) const {
  switch (kind) {
    case Kind::L1:
      if (xi > 0.0) return {scale, scale};
      if (xi < 0.0) return {-scale, -scale};
      return {-scale, scale};
    case Kind::NegEntropy: {
      const double d = scale * (std::log(std::max(xi, kEntropyFloor)) + 1.0);
      return {d, d};
    }
  }
  return {0.0, 0.0};
}

ModelPart ModelPart::linear(Vector anchor, Vector g) {
  ModelPart p;
  p.anchor = std::move(anchor);
  p.g = std::move(g);
  return p;
}

ModelPart ModelPart::linear_plus_simple(Vector anchor, Vector g, SimpleConvexFn simple) {
  ModelPart p;
  p.base_value = simple(anchor);
  p.anchor = std::move(anchor);
  p.g = std::move(g);
  p.simple = simple;
  return p;
}

double ModelPart::operator()(const Vector& x) const {
  double v = g.dot(x - anchor);
  if (simple) v += (*simple)(x) - base_value;
  return v;
}

ModelCheckReport check_model_inequality(const std::function<double(const Vector&)>& true_f,
                                        ModelOracle& oracle, double L, const Geometry& geometry,
                                        const std::vector<std::pair<Vector, Vector>>& sample_pairs,
                                        InequalityKind kind) {
  ModelCheckReport report;
  report.min_lower = std::numeric_limits<double>::infinity();
  report.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : sample_pairs) {
    const ModelEvaluation ev = oracle.query(y);
    const double fx = true_f(x);
    PairResidual r;
    r.lower = fx - ev.f_value - ev.part(x);
    const double quad = kind == InequalityKind::NormModel
                            ? 0.5 * L * std::pow(geometry.norm_of(x - y), 2)
                            : L * bregman(geometry, y, x);
    r.slack = quad + ev.delta - r.lower;
    const double tol = float_slack(fx);
    r.violated = r.lower < -tol || r.slack < -tol;
    if (r.violated) ++report.violations;
    report.min_lower = std::min(report.min_lower, r.lower);
    report.min_slack = std::min(report.min_slack, r.slack);
    report.pairs.push_back(r);
  }
  return report;
}

}  // namespace modelopt
