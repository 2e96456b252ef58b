#include "modelopt/problems.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace modelopt {

namespace {

class Params {
 public:
  Params(std::string problem, const ProblemParams& params, std::set<std::string> allowed)
      : problem_(std::move(problem)), params_(params) {
    for (const auto& [k, v] : params_) {
      if (!allowed.count(k)) {
        throw Error(ErrorKind::RejectedInput, "unknown parameter '" + k + "' for problem " + problem_);
      }
    }
  }

  double real(const std::string& key, double fallback) const {
    auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size() || !std::isfinite(v)) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorKind::RejectedInput, problem_ + ": parameter " + key + " is not a finite number");
    }
  }

  long integer(const std::string& key, long fallback) const {
    const double v = real(key, static_cast<double>(fallback));
    if (v != std::floor(v)) throw Error(ErrorKind::RejectedInput, problem_ + ": parameter " + key + " must be an integer");
    return static_cast<long>(v);
  }

  std::optional<Vector> list(const std::string& key) const {
    auto it = params_.find(key);
    if (it == params_.end()) return std::nullopt;
    std::vector<double> values;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        values.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw Error(ErrorKind::RejectedInput, problem_ + ": bad entry '" + item + "' in " + key);
      }
    }
    if (values.empty()) throw Error(ErrorKind::RejectedInput, problem_ + ": empty list " + key);
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  }

 private:
  std::string problem_;
  const ProblemParams& params_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::RejectedInput, what);
}

Vector log_spaced_curvatures(Eigen::Index n, double kappa) {
  Vector lambda(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    lambda[i] = std::pow(kappa, -t);
  }
  return lambda;
}

// log(1 + e^t) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double half_sq(const Vector& v) { return 0.5 * v.squaredNorm(); }

ProblemInstance quadratic(const ProblemParams& raw) {
  Params p("quadratic", raw, {"n", "kappa", "a", "noise"});
  auto a_param = p.list("a");
  const long n = a_param ? static_cast<long>(a_param->size()) : p.integer("n", 10);
  require(n >= 1, "quadratic: n must be >= 1");
  require(!a_param || !raw.count("n") || p.integer("n", n) == n, "quadratic: n disagrees with a");
  const double kappa = p.real("kappa", 100.0);
  require(kappa >= 1.0, "quadratic: kappa must be >= 1");
  const double noise = p.real("noise", 0.0);
  require(noise >= 0.0, "quadratic: noise must be >= 0");

  const Vector lambda = log_spaced_curvatures(n, kappa);
  const Vector a = a_param ? *a_param : Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  auto f = [lambda, a](const Vector& x) {
    const Vector d = x - a;
    return 0.5 * d.dot(lambda.cwiseProduct(d));
  };
  auto grad = [lambda, a](const Vector& x) -> Vector { return lambda.cwiseProduct(x - a); };

  ProblemInstance P;
  P.name = "quadratic";
  P.dim = n;
  P.oracle = smooth_model(f, grad);
  if (noise > 0.0) P.oracle = value_noise_model(P.oracle, noise);
  P.geometry = Geometry::euclidean();
  P.set = WholeSpace{};
  P.f = f;
  P.x0 = Vector::Zero(n);
  P.x_star = a;
  P.f_star = 0.0;
  P.r2 = half_sq(a);
  P.true_L = lambda.maxCoeff();
  return P;
}

ProblemInstance stochastic_quadratic(const ProblemParams& raw) {
  Params p("stochastic-quadratic", raw, {"n", "kappa", "sigma", "seed"});
  const long n = p.integer("n", 2);
  require(n >= 1, "stochastic-quadratic: n must be >= 1");
  const double kappa = p.real("kappa", 10.0);
  require(kappa >= 1.0, "stochastic-quadratic: kappa must be >= 1");
  const double sigma = p.real("sigma", 0.1);
  require(sigma >= 0.0, "stochastic-quadratic: sigma must be >= 0");
  const long seed = p.integer("seed", 4);
  require(seed >= 0, "stochastic-quadratic: seed must be >= 0");

  const Vector lambda = log_spaced_curvatures(n, kappa);
  const Vector a = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  auto f = [lambda, a](const Vector& x) {
    const Vector d = x - a;
    return 0.5 * d.dot(lambda.cwiseProduct(d));
  };
  auto grad = [lambda, a](const Vector& x) -> Vector { return lambda.cwiseProduct(x - a); };

  StochasticSampler s;
  s.dim = n;
  s.sigma = sigma;
  s.seed = static_cast<std::uint64_t>(seed);
  s.draw = [n, sigma](std::mt19937_64& rng) -> Vector {
    Vector xi(n);
    if (sigma == 0.0) return Vector::Zero(n);
    std::normal_distribution<double> normal(0.0, sigma);
    for (Eigen::Index i = 0; i < n; ++i) xi[i] = normal(rng);
    return xi;
  };
  s.value_sample = [f, a](const Vector& x, const Vector& xi) { return f(x) + xi.dot(x - a); };
  s.grad_sample = [grad](const Vector& x, const Vector& xi) -> Vector { return grad(x) + xi; };

  ProblemInstance P;
  P.name = "stochastic-quadratic";
  P.dim = n;
  P.oracle = smooth_model(f, grad);
  P.geometry = Geometry::euclidean();
  P.set = WholeSpace{};
  P.f = f;
  P.x0 = Vector::Zero(n);
  P.x_star = a;
  P.f_star = 0.0;
  P.r2 = half_sq(a);
  P.true_L = lambda.maxCoeff();
  P.sampler = s;
  return P;
}

ProblemInstance logistic_synthetic(const ProblemParams& raw) {
  Params p("logistic-synthetic", raw, {"n", "samples", "ridge", "seed"});
  const long n = p.integer("n", 20);
  const long M = p.integer("samples", 500);
  const double ridge = p.real("ridge", 1e-3);
  const long seed = p.integer("seed", 1);
  require(n >= 1 && M >= 1, "logistic-synthetic: n and samples must be >= 1");
  require(ridge > 0.0, "logistic-synthetic: ridge must be > 0");
  require(seed >= 0, "logistic-synthetic: seed must be >= 0");

  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(M, n);
  Vector w(n);
  for (long j = 0; j < n; ++j) w[j] = normal(rng);
  Vector labels(M);
  for (long i = 0; i < M; ++i) {
    for (long j = 0; j < n; ++j) A(i, j) = normal(rng) / std::sqrt(static_cast<double>(n));
    const double margin = A.row(i).dot(w) + 0.5 * normal(rng);
    labels[i] = margin >= 0.0 ? 1.0 : -1.0;
  }
  // Rows pre-multiplied by their labels.
  const Matrix Ab = labels.asDiagonal() * A;
  const double Md = static_cast<double>(M);

  auto f = [Ab, ridge, Md](const Vector& x) {
    const Vector t = -(Ab * x);
    double s = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) s += softplus(t[i]);
    return s / Md + 0.5 * ridge * x.squaredNorm();
  };
  auto grad = [Ab, ridge, Md](const Vector& x) -> Vector {
    const Vector t = -(Ab * x);
    Vector w_i(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) w_i[i] = sigmoid(t[i]);
    return -(Ab.transpose() * w_i) / Md + ridge * x;
  };

  // Reference optimum by damped Newton; strong convexity (ridge) turns the
  // final gradient norm into certified error bars.
  Vector x = Vector::Zero(n);
  for (int it = 0; it < 100; ++it) {
    const Vector g = grad(x);
    if (g.norm() <= 1e-14) break;
    const Vector t = -(Ab * x);
    Vector curv(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double s = sigmoid(t[i]);
      curv[i] = s * (1.0 - s);
    }
    Matrix H = Ab.transpose() * curv.asDiagonal() * Ab / Md;
    H.diagonal().array() += ridge;
    const Vector step = H.ldlt().solve(g);
    double tau = 1.0;
    const double fx = f(x);
    while (tau > 1e-10 && f(x - tau * step) > fx - 0.25 * tau * g.dot(step)) tau *= 0.5;
    x -= tau * step;
  }
  const double gnorm = grad(x).norm();
  const double sv = Eigen::JacobiSVD<Matrix>(Ab).singularValues()(0);

  StochasticSampler s;
  s.dim = 1;
  s.seed = static_cast<std::uint64_t>(seed);
  s.draw = [M](std::mt19937_64& r) -> Vector {
    std::uniform_int_distribution<long> pick(0, M - 1);
    return Vector::Constant(1, static_cast<double>(pick(r)));
  };
  s.value_sample = [Ab, ridge](const Vector& x, const Vector& xi) {
    const auto i = static_cast<Eigen::Index>(xi[0]);
    return softplus(-Ab.row(i).dot(x)) + 0.5 * ridge * x.squaredNorm();
  };
  s.grad_sample = [Ab, ridge](const Vector& x, const Vector& xi) -> Vector {
    const auto i = static_cast<Eigen::Index>(xi[0]);
    return -sigmoid(-Ab.row(i).dot(x)) * Ab.row(i).transpose() + ridge * x;
  };
  {
    const Vector g0 = grad(Vector::Zero(n));
    double var = 0.0;
    for (long i = 0; i < M; ++i) {
      var += (s.grad_sample(Vector::Zero(n), Vector::Constant(1, static_cast<double>(i))) - g0).squaredNorm();
    }
    s.sigma = std::sqrt(var / Md);
  }

  ProblemInstance P;
  P.name = "logistic-synthetic";
  P.dim = n;
  P.oracle = smooth_model(f, grad);
  P.geometry = Geometry::euclidean();
  P.set = WholeSpace{};
  P.f = f;
  P.x0 = Vector::Zero(n);
  P.x_star = x;
  P.f_star = f(x);
  P.f_star_error = gnorm * gnorm / (2.0 * ridge) + 1e-15 * std::abs(P.f_star);
  const double radius = x.norm() + gnorm / ridge;
  P.r2 = 0.5 * radius * radius;
  P.true_L = sv * sv / (4.0 * Md) + ridge;
  P.sampler = s;
  return P;
}

ProblemInstance lasso_composite(const ProblemParams& raw) {
  Params p("lasso-composite", raw, {"n", "samples", "lambda", "seed"});
  const long n = p.integer("n", 20);
  const long M = p.integer("samples", 50);
  const double lambda = p.real("lambda", 0.1);
  const long seed = p.integer("seed", 2);
  require(n >= 1 && M >= n, "lasso-composite: need samples >= n >= 1");
  require(lambda > 0.0, "lasso-composite: lambda must be > 0");
  require(seed >= 0, "lasso-composite: seed must be >= 0");

  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(M, n);
  for (long i = 0; i < M; ++i)
    for (long j = 0; j < n; ++j) A(i, j) = normal(rng);
  Vector truth = Vector::Zero(n);
  for (long j = 0; j < std::min<long>(5, n); ++j) truth[j] = j % 2 == 0 ? 1.0 : -1.0;
  Vector b = A * truth;
  for (long i = 0; i < M; ++i) b[i] += 0.1 * normal(rng);
  const double Md = static_cast<double>(M);

  auto g = [A, b, Md](const Vector& x) { return (A * x - b).squaredNorm() / (2.0 * Md); };
  auto grad_g = [A, b, Md](const Vector& x) -> Vector { return A.transpose() * (A * x - b) / Md; };
  const SimpleConvexFn h = SimpleConvexFn::l1(lambda);
  auto f = [g, h](const Vector& x) { return g(x) + h(x); };

  const Eigen::SelfAdjointEigenSolver<Matrix> eig(A.transpose() * A / Md);
  const double L = eig.eigenvalues().maxCoeff();
  const double mu = eig.eigenvalues().minCoeff();

  // Reference: FISTA, then an exact solve on the detected support with
  // signs; certified by the dual gap.
  Vector x = Vector::Zero(n), y = x;
  double t = 1.0;
  for (int it = 0; it < 20000; ++it) {
    Vector v = y - grad_g(y) / L;
    Vector xn(n);
    for (long j = 0; j < n; ++j) {
      const double thr = lambda / L;
      xn[j] = v[j] > thr ? v[j] - thr : (v[j] < -thr ? v[j] + thr : 0.0);
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = xn + ((t - 1.0) / tn) * (xn - x);
    x = xn;
    t = tn;
  }
  auto dual_gap = [&](const Vector& xc) {
    const Vector r = A * xc - b;
    const double scale = std::max(1.0, (A.transpose() * r / Md).lpNorm<Eigen::Infinity>() / lambda);
    const Vector nu = r / (Md * scale);
    const double dual = -0.5 * Md * nu.squaredNorm() - nu.dot(b);
    return f(xc) - dual;
  };
  {
    std::vector<Eigen::Index> support;
    for (long j = 0; j < n; ++j)
      if (x[j] != 0.0) support.push_back(j);
    if (!support.empty()) {
      const auto k = static_cast<Eigen::Index>(support.size());
      Matrix AS(M, k);
      Vector sg(k);
      for (Eigen::Index c = 0; c < k; ++c) {
        AS.col(c) = A.col(support[c]);
        sg[c] = x[support[c]] > 0.0 ? 1.0 : -1.0;
      }
      const Vector xs = (AS.transpose() * AS).ldlt().solve(AS.transpose() * b - Md * lambda * sg);
      Vector polished = Vector::Zero(n);
      for (Eigen::Index c = 0; c < k; ++c) polished[support[c]] = xs[c];
      if (dual_gap(polished) < dual_gap(x)) x = polished;
    }
  }
  const double gap = std::max(0.0, dual_gap(x));

  ProblemInstance P;
  P.name = "lasso-composite";
  P.dim = n;
  P.oracle = composite_model(g, grad_g, h);
  P.geometry = Geometry::euclidean();
  P.set = WholeSpace{};
  P.f = f;
  P.x0 = Vector::Zero(n);
  P.x_star = x;
  P.f_star = f(x);
  P.f_star_error = gap + 1e-15 * std::abs(P.f_star);
  const double radius = x.norm() + std::sqrt(2.0 * P.f_star_error / mu);
  P.r2 = 0.5 * radius * radius;
  P.true_L = L;
  return P;
}

ProblemInstance holder_abs(const ProblemParams& raw) {
  Params p("holder-abs", raw, {"n", "nu", "delta"});
  const long n = p.integer("n", 1);
  require(n >= 1, "holder-abs: n must be >= 1");
  require(p.real("nu", 0.0) == 0.0, "holder-abs: only nu = 0 is available");
  const double delta = p.real("delta", 1e-2);
  require(delta > 0.0, "holder-abs: delta must be > 0");

  auto f = [](const Vector& x) { return x.lpNorm<1>(); };
  auto subgrad = [](const Vector& x) -> Vector {
    return x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
  };
  // Subgradient differences of the l1 norm reach 2 sqrt(n) in the 2-norm.
  HolderSpec spec{2.0 * std::sqrt(static_cast<double>(n)), 0.0, delta};

  ProblemInstance P;
  P.name = "holder-abs";
  P.dim = n;
  P.oracle = holder_model(f, subgrad, spec);
  P.geometry = Geometry::euclidean();
  P.set = WholeSpace{};
  P.f = f;
  P.x0 = Vector::Ones(n);
  P.x_star = Vector::Zero(n);
  P.f_star = 0.0;
  P.r2 = 0.5 * static_cast<double>(n);
  P.true_L = holder_L(spec);
  return P;
}

ProblemInstance simplex_linear_entropy(const ProblemParams& raw) {
  Params p("simplex-linear-entropy", raw, {"n", "L", "seed"});
  const long n = p.integer("n", 10);
  require(n >= 2, "simplex-linear-entropy: n must be >= 2");
  const double L = p.real("L", 1.0);
  require(L > 0.0, "simplex-linear-entropy: L must be > 0");
  const long seed = p.integer("seed", 3);
  require(seed >= 0, "simplex-linear-entropy: seed must be >= 0");

  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector c(n);
  for (long i = 0; i < n; ++i) c[i] = unif(rng);
  Eigen::Index best = 0;
  c.minCoeff(&best);

  auto f = [c](const Vector& x) { return c.dot(x); };
  auto grad = [c](const Vector&) -> Vector { return c; };

  ProblemInstance P;
  P.name = "simplex-linear-entropy";
  P.dim = n;
  P.oracle = smooth_model(f, grad);
  P.geometry = Geometry::entropy_simplex();
  P.set = Simplex{n};
  P.f = f;
  P.x0 = Vector::Constant(n, 1.0 / static_cast<double>(n));
  P.x_star = Vector::Unit(n, best);
  P.f_star = c[best];
  P.r2 = bregman(P.geometry, P.x0, *P.x_star);
  P.true_L = L;
  return P;
}

DualEvaluator half_norm_dual(const AffineConstraints& cons) {
  // f = 1/2 |x|^2 over the whole space: x(z) = -B^T z.
  const Matrix B = cons.B;
  const Vector c = cons.c;
  return {[B, c](const Vector& z) { return 0.5 * (B.transpose() * z).squaredNorm() + z.dot(c); },
          [B](const Vector& z) -> Vector { return -(B.transpose() * z); }};
}

ProblemInstance projection_qp(const ProblemParams& raw) {
  Params p("projection-qp", raw, {});
  AffineConstraints cons;
  cons.B = Matrix(1, 2);
  cons.B << -1.0, 0.0;
  cons.c = Vector::Constant(1, -1.0);
  cons.sense = {Sense::LessEqual};

  auto f = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  auto grad = [](const Vector& x) -> Vector { return x; };

  ProblemInstance P;
  P.name = "projection-qp";
  P.dim = 2;
  P.oracle = smooth_model(f, grad);
  P.geometry = Geometry::euclidean();
  P.set = AffineConstrained{WholeSpace{}, cons};
  P.f = f;
  P.x0 = Vector::Zero(2);
  P.x_star = Vector::Unit(2, 0);
  P.f_star = 0.5;
  P.r2 = 0.5;
  P.true_L = 1.0;
  P.dual = half_norm_dual(cons);
  P.z_star = Vector::Constant(1, 1.0);
  return P;
}

// argmin over x > 0 of t x + mu/2 x^2 + gamma x ln x, by bisection in ln x.
double entropic_scalar_argmin(double t, double mu, double gamma) {
  auto F = [&](double s) { return t + mu * std::exp(s) + gamma * (s + 1.0); };
  double lo = -700.0, hi = 50.0;
  if (F(lo) > 0.0) return std::exp(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) > 0.0 ? hi : lo) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

ProblemInstance transport_toy(const ProblemParams& raw) {
  Params p("transport-toy", raw, {"mu", "gamma"});
  const double mu = p.real("mu", 1.0);
  const double gamma = p.real("gamma", 0.1);
  require(mu > 0.0 && gamma > 0.0, "transport-toy: mu and gamma must be > 0");
  constexpr int k = 3;
  constexpr int n = k * k;

  Vector C(n);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) C[i * k + j] = i == j ? 0.0 : 1.0;
  AffineConstraints cons;
  cons.B = Matrix::Zero(2 * k, n);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      cons.B(i, i * k + j) = 1.0;      // row marginals
      cons.B(k + j, i * k + j) = 1.0;  // column marginals
    }
  }
  cons.c = Vector::Constant(2 * k, 1.0 / k);
  cons.sense.assign(2 * k, Sense::Equal);

  auto g = [C, mu](const Vector& x) { return C.dot(x) + 0.5 * mu * x.squaredNorm(); };
  auto grad_g = [C, mu](const Vector& x) -> Vector { return C + mu * x; };
  const SimpleConvexFn h = SimpleConvexFn::neg_entropy(gamma);
  auto f = [g, h](const Vector& x) { return g(x) + h(x); };

  // Reference pair: damped Newton on the KKT system with the last
  // (redundant) marginal row dropped.
  const Matrix B5 = cons.B.topRows(2 * k - 1);
  const Vector c5 = cons.c.head(2 * k - 1);
  Vector x = Vector::Constant(n, 1.0 / n);
  Vector z = Vector::Zero(2 * k - 1);
  auto kkt = [&](const Vector& xv, const Vector& zv) {
    Vector r(n + 2 * k - 1);
    r.head(n) = C + mu * xv + gamma * (xv.array().log() + 1.0).matrix() + B5.transpose() * zv;
    r.tail(2 * k - 1) = B5 * xv - c5;
    return r;
  };
  for (int it = 0; it < 200; ++it) {
    const Vector r = kkt(x, z);
    if (r.lpNorm<Eigen::Infinity>() <= 1e-15) break;
    Matrix J = Matrix::Zero(n + 2 * k - 1, n + 2 * k - 1);
    J.topLeftCorner(n, n).diagonal() = (mu + gamma * x.array().inverse()).matrix();
    J.topRightCorner(n, 2 * k - 1) = B5.transpose();
    J.bottomLeftCorner(2 * k - 1, n) = B5;
    const Vector step = J.fullPivLu().solve(-r);
    double tau = 1.0;
    while ((x + tau * step.head(n)).minCoeff() <= 0.0) tau *= 0.5;
    const double before = r.norm();
    while (tau > 1e-12 && kkt(x + tau * step.head(n), z + tau * step.tail(2 * k - 1)).norm() > (1.0 - 1e-4 * tau) * before) {
      tau *= 0.5;
    }
    x += tau * step.head(n);
    z += tau * step.tail(2 * k - 1);
  }
  Vector z_full = Vector::Zero(2 * k);
  z_full.head(2 * k - 1) = z;

  const Matrix B = cons.B;
  const Vector c = cons.c;
  DualEvaluator dual;
  dual.maximizer = [B, C, mu, gamma](const Vector& zv) -> Vector {
    const Vector t = C + B.transpose() * zv;
    Vector xz(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) xz[i] = entropic_scalar_argmin(t[i], mu, gamma);
    return xz;
  };
  dual.g = [B, c, f, maximizer = dual.maximizer](const Vector& zv) {
    const Vector xz = maximizer(zv);
    return -f(xz) - zv.dot(B * xz - c);
  };

  ProblemInstance P;
  P.name = "transport-toy";
  P.dim = n;
  P.oracle = composite_model(g, grad_g, h);
  P.geometry = Geometry::euclidean();
  P.set = AffineConstrained{WholeSpace{}, cons};
  P.f = f;
  P.x0 = Vector::Constant(n, 1.0 / n);
  P.x_star = x;
  P.f_star = f(x);
  P.f_star_error = 1e-12;
  P.r2 = half_sq(P.x0 - x);
  P.true_L = mu;
  P.dual = dual;
  P.z_star = z_full;
  return P;
}

}  // namespace

std::vector<std::string> problem_names() {
  return {"quadratic",   "logistic-synthetic", "lasso-composite",  "holder-abs", "simplex-linear-entropy",
          "projection-qp", "transport-toy",    "stochastic-quadratic"};
}

ProblemInstance build_problem(const std::string& name, const ProblemParams& params) {
  ProblemInstance P;
  if (name == "quadratic") P = quadratic(params);
  else if (name == "logistic-synthetic") P = logistic_synthetic(params);
  else if (name == "lasso-composite") P = lasso_composite(params);
  else if (name == "holder-abs") P = holder_abs(params);
  else if (name == "simplex-linear-entropy") P = simplex_linear_entropy(params);
  else if (name == "projection-qp") P = projection_qp(params);
  else if (name == "transport-toy") P = transport_toy(params);
  else if (name == "stochastic-quadratic") P = stochastic_quadratic(params);
  else throw Error(ErrorKind::RejectedInput, "unknown problem '" + name + "'");
  P.params = params;
  return P;
}

double eval_dual(const ProblemInstance& problem, const Vector& z) {
  if (!problem.dual) throw Error(ErrorKind::Capability, problem.name + " has no dual evaluator");
  const auto& cons = std::get<AffineConstrained>(problem.set).constraints;
  if (z.size() != cons.rows() || !z.allFinite()) {
    throw Error(ErrorKind::RejectedInput, "multiplier vector has the wrong size or non-finite entries");
  }
  return problem.dual->g(z);
}

std::shared_ptr<MiniBatchOracle> make_minibatch_oracle(const ProblemInstance& problem,
                                                       std::size_t batch, std::uint64_t seed) {
  if (!problem.sampler) throw Error(ErrorKind::Capability, problem.name + " has no stochastic sampler");
  StochasticSampler s = *problem.sampler;
  s.seed = seed;
  return minibatch_model(std::move(s), batch);
}

ProblemParams parse_params(const std::vector<std::string>& pairs) {
  ProblemParams out;
  for (const std::string& kv : pairs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::RejectedInput, "parameter '" + kv + "' is not of the form key=value");
    }
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

}  // namespace modelopt
