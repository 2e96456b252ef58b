#include "modelopt/builders.hpp"

#include <cstring>
#include <limits>
#include <sstream>

namespace modelopt {

namespace {

[[noreturn]] void throw_non_finite(const char* what, const Vector& y) {
  std::ostringstream os;
  os << "non-finite " << what << " at query point " << format_vector(y);
  throw Error(ErrorKind::Evaluation, os.str());
}

void check_query(const Vector& y) {
  if (y.size() == 0 || !y.allFinite()) {
    throw Error(ErrorKind::RejectedInput, "query point must be finite and non-empty");
  }
}

class FunctionModel final : public ModelOracle {
 public:
  FunctionModel(ScalarFn f, VectorFn grad, double delta, std::optional<double> hint)
      : f_(std::move(f)), grad_(std::move(grad)), delta_(delta), hint_(hint) {}

  ModelEvaluation query(const Vector& y) override {
    check_query(y);
    const double fy = f_(y);
    if (!std::isfinite(fy)) throw_non_finite("function value", y);
    Vector g = grad_(y);
    if (g.size() != y.size() || !g.allFinite()) throw_non_finite("gradient", y);
    return {fy, ModelPart::linear(y, std::move(g)), delta_, hint_};
  }

  double value(const Vector& x) override {
    check_query(x);
    const double fx = f_(x);
    if (!std::isfinite(fx)) throw_non_finite("function value", x);
    return fx;
  }

 private:
  ScalarFn f_;
  VectorFn grad_;
  double delta_;
  std::optional<double> hint_;
};

class CompositeModel final : public ModelOracle {
 public:
  CompositeModel(ScalarFn g, VectorFn grad_g, SimpleConvexFn h)
      : g_(std::move(g)), grad_g_(std::move(grad_g)), h_(h) {}

  ModelEvaluation query(const Vector& y) override {
    check_query(y);
    const double fy = value(y);
    Vector grad = grad_g_(y);
    if (grad.size() != y.size() || !grad.allFinite()) throw_non_finite("gradient", y);
    return {fy, ModelPart::linear_plus_simple(y, std::move(grad), h_), 0.0, std::nullopt};
  }

  double value(const Vector& x) override {
    check_query(x);
    const double fx = g_(x) + h_(x);
    if (!std::isfinite(fx)) throw_non_finite("function value", x);
    return fx;
  }

 private:
  ScalarFn g_;
  VectorFn grad_g_;
  SimpleConvexFn h_;
};

// FNV-1a over the coordinate bytes, mapped to [0, 1].
double unit_hash(const Vector& y) {
  std::uint64_t h = 1469598103934665603ull;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    std::uint64_t bits;
    const double v = y[i] == 0.0 ? 0.0 : y[i];  // fold -0.0
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

class ValueNoiseModel final : public ModelOracle {
 public:
  ValueNoiseModel(OraclePtr base, double delta) : base_(std::move(base)), delta_(delta) {}

  ModelEvaluation query(const Vector& y) override {
    ModelEvaluation ev = base_->query(y);
    ev.f_value -= delta_ * unit_hash(y);
    ev.delta += delta_;
    return ev;
  }

  double value(const Vector& x) override { return base_->value(x) - delta_ * unit_hash(x); }

 private:
  OraclePtr base_;
  double delta_;
};

}  // namespace

double holder_L(const HolderSpec& spec) {
  const double nu = spec.exponent;
  const double Lnu = spec.holder_constant;
  if (!(nu >= 0.0 && nu <= 1.0)) throw Error(ErrorKind::RejectedInput, "Holder exponent must lie in [0, 1]");
  if (!(Lnu > 0.0) || !std::isfinite(Lnu)) throw Error(ErrorKind::RejectedInput, "Holder constant must be positive");
  if (nu == 1.0) return Lnu;
  const double delta = spec.control_delta;
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::RejectedInput, "Holder model with nu < 1 needs a positive control delta");
  }
  const double power = (1.0 - nu) / (1.0 + nu);
  return Lnu * std::pow(Lnu / (2.0 * delta) * power, power);
}

OraclePtr smooth_model(ScalarFn f, VectorFn grad) {
  return std::make_shared<FunctionModel>(std::move(f), std::move(grad), 0.0, std::nullopt);
}

OraclePtr holder_model(ScalarFn f, VectorFn subgrad, const HolderSpec& spec) {
  const double L = holder_L(spec);
  return std::make_shared<FunctionModel>(std::move(f), std::move(subgrad), spec.control_delta, L);
}

OraclePtr composite_model(ScalarFn g, VectorFn grad_g, SimpleConvexFn h) {
  if (!(h.scale >= 0.0) || !std::isfinite(h.scale)) {
    throw Error(ErrorKind::RejectedInput, "simple term scale must be nonnegative");
  }
  return std::make_shared<CompositeModel>(std::move(g), std::move(grad_g), h);
}

OraclePtr value_noise_model(OraclePtr base, double delta) {
  if (!(delta >= 0.0)) throw Error(ErrorKind::RejectedInput, "noise level must be nonnegative");
  if (base->kind() != OracleKind::Deterministic) {
    throw Error(ErrorKind::RejectedInput, "value noise wraps deterministic oracles only");
  }
  return std::make_shared<ValueNoiseModel>(std::move(base), delta);
}

std::mt19937_64 stream_generator(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x6d6f646cu};
  return std::mt19937_64(seq);
}

MiniBatch::MiniBatch(const StochasticSampler& sampler, std::vector<Vector> xis)
    : sampler_(&sampler), xis_(std::move(xis)) {}

double MiniBatch::value(const Vector& x) const {
  double s = 0.0;
  for (const Vector& xi : xis_) s += sampler_->value_sample(x, xi);
  return s / static_cast<double>(xis_.size());
}

Vector MiniBatch::gradient(const Vector& x) const {
  Vector s = Vector::Zero(x.size());
  for (const Vector& xi : xis_) s += sampler_->grad_sample(x, xi);
  return s / static_cast<double>(xis_.size());
}

MiniBatch draw_minibatch(const StochasticSampler& sampler, std::size_t m, std::uint64_t index) {
  if (m == 0) throw Error(ErrorKind::RejectedInput, "mini-batch size must be >= 1");
  if (!sampler.draw || !sampler.value_sample || !sampler.grad_sample) {
    throw Error(ErrorKind::Reproducibility, "sampler is missing its randomness or sample functions");
  }
  if (index == std::numeric_limits<std::uint64_t>::max()) {
    throw Error(ErrorKind::Reproducibility, "random stream index exhausted");
  }
  std::mt19937_64 rng = stream_generator(sampler.seed, index);
  std::vector<Vector> xis;
  xis.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    Vector xi = sampler.draw(rng);
    if (!xi.allFinite()) throw Error(ErrorKind::Reproducibility, "sampler produced non-finite randomness");
    xis.push_back(std::move(xi));
  }
  return MiniBatch(sampler, std::move(xis));
}

MiniBatchOracle::MiniBatchOracle(StochasticSampler sampler, std::size_t batch)
    : sampler_(std::move(sampler)), batch_(batch) {
  if (batch_ == 0) throw Error(ErrorKind::RejectedInput, "mini-batch size must be >= 1");
}

ModelEvaluation MiniBatchOracle::query(const Vector& y) {
  check_query(y);
  const MiniBatch mb = draw_minibatch(sampler_, batch_, calls_++);
  samples_ += batch_;
  const double fy = mb.value(y);
  Vector g = mb.gradient(y);
  if (!std::isfinite(fy)) throw_non_finite("function value", y);
  if (!g.allFinite()) throw_non_finite("gradient", y);
  return {fy, ModelPart::linear(y, std::move(g)), 0.0, std::nullopt};
}

double MiniBatchOracle::value(const Vector& x) {
  check_query(x);
  const MiniBatch mb = draw_minibatch(sampler_, batch_, calls_++);
  samples_ += batch_;
  return mb.value(x);
}

std::shared_ptr<MiniBatchOracle> minibatch_model(StochasticSampler sampler, std::size_t batch) {
  return std::make_shared<MiniBatchOracle>(std::move(sampler), batch);
}

}  // namespace modelopt
