#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace modelopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorKind {
  RejectedInput,
  Evaluation,
  Capability,
  Divergence,
  Infeasible,
  Convergence,
  Reproducibility,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Absolute slack applied to every inequality check: 1e-10 * max(1, |m|).
inline double float_slack(double magnitude) {
  return 1e-10 * std::max(1.0, std::abs(magnitude));
}

bool all_finite(const Vector& v);

std::string format_vector(const Vector& v, int max_entries = 8);

namespace detail {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace detail

}  // namespace modelopt
