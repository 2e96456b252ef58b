#pragma once

#include <cstdint>
#include <random>

#include "modelopt/model.hpp"

namespace modelopt {

using ScalarFn = std::function<double(const Vector&)>;
using VectorFn = std::function<Vector(const Vector&)>;

struct HolderSpec {
  double holder_constant = 1.0;  // L_nu
  double exponent = 1.0;         // nu in [0, 1]
  double control_delta = 0.0;    // delta > 0 required when nu < 1
};

/// L(delta) = L_nu * [L_nu / (2 delta) * (1 - nu) / (1 + nu)]^((1 - nu) / (1 + nu)).
double holder_L(const HolderSpec& spec);

/// Linear model <grad f(y), x - y> with f_delta = f and delta = 0.
OraclePtr smooth_model(ScalarFn f, VectorFn grad);

/// Linear model for a function with Holder-continuous subgradients; reports
/// delta = spec.control_delta and lip_hint = holder_L(spec).
OraclePtr holder_model(ScalarFn f, VectorFn subgrad, const HolderSpec& spec);

/// <grad g(y), x - y> + h(x) - h(y) for f = g + h.
OraclePtr composite_model(ScalarFn g, VectorFn grad_g, SimpleConvexFn h);

/// Wraps a deterministic oracle and lowers its reported value by
/// delta * u(y), u(y) in [0, 1] a fixed hash of y. The result is still a pure
/// (delta_base + delta, L)-model of the same function.
OraclePtr value_noise_model(OraclePtr base, double delta);

/// Randomness source for f(x) = E f(x, xi).
struct StochasticSampler {
  Eigen::Index dim = 0;
  std::function<Vector(std::mt19937_64&)> draw;
  std::function<double(const Vector& x, const Vector& xi)> value_sample;
  std::function<Vector(const Vector& x, const Vector& xi)> grad_sample;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Generator for stream `index` of a seed; independent of any other stream.
std::mt19937_64 stream_generator(std::uint64_t seed, std::uint64_t index);

/// m realizations of xi shared by every value/gradient evaluated from it.
class MiniBatch {
 public:
  MiniBatch(const StochasticSampler& sampler, std::vector<Vector> xis);

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  std::size_t size() const { return xis_.size(); }

 private:
  const StochasticSampler* sampler_;
  std::vector<Vector> xis_;
};

/// Draws m samples from stream `index`. Throws Reproducibility when the
/// sampler yields malformed randomness.
MiniBatch draw_minibatch(const StochasticSampler& sampler, std::size_t m, std::uint64_t index);

/// Stochastic oracle: every query draws m fresh samples from the next stream
/// and returns the averaged value with the averaged-gradient linear model.
class MiniBatchOracle final : public ModelOracle {
 public:
  MiniBatchOracle(StochasticSampler sampler, std::size_t batch);

  ModelEvaluation query(const Vector& y) override;
  double value(const Vector& x) override;
  OracleKind kind() const override { return OracleKind::Stochastic; }

  std::size_t batch() const { return batch_; }
  std::uint64_t calls() const { return calls_; }
  std::uint64_t samples_drawn() const { return samples_; }

 private:
  StochasticSampler sampler_;
  std::size_t batch_;
  std::uint64_t calls_ = 0;
  std::uint64_t samples_ = 0;
};

std::shared_ptr<MiniBatchOracle> minibatch_model(StochasticSampler sampler, std::size_t batch);

}  // namespace modelopt
