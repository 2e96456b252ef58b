#include <algorithm>

#include "modelopt/solvers.hpp"

namespace modelopt {

const char* theorem_name(Theorem t) {
  switch (t) {
    case Theorem::GM: return "gm";
    case Theorem::FGM: return "fgm";
    case Theorem::GMRelative: return "gm-rel";
    case Theorem::PDGM: return "pd-gm";
    case Theorem::PDFGM: return "pd-fgm";
    case Theorem::SFGM: return "sfgm";
  }
  return "?";
}

std::optional<Theorem> parse_theorem(const std::string& name) {
  for (Theorem t : {Theorem::GM, Theorem::FGM, Theorem::GMRelative, Theorem::PDGM, Theorem::PDFGM,
                    Theorem::SFGM}) {
    if (name == theorem_name(t)) return t;
  }
  return std::nullopt;
}

std::optional<Theorem> theorem_for(Method m) {
  switch (m) {
    case Method::GM: return Theorem::GM;
    case Method::FGM: return Theorem::FGM;
    case Method::GMRelative: return Theorem::GMRelative;
    case Method::PDGM: return Theorem::PDGM;
    case Method::PDFGM: return Theorem::PDFGM;
    case Method::SFGM: return Theorem::SFGM;
    case Method::ASFGM: return std::nullopt;
  }
  return std::nullopt;
}

BoundAccumulator::BoundAccumulator(Theorem theorem, double r2, std::optional<double> L)
    : theorem_(theorem), r2_(r2), L_(L) {
  if (!(r2 >= 0.0)) throw Error(ErrorKind::RejectedInput, "R^2 must be nonnegative");
  if ((theorem == Theorem::GMRelative || theorem == Theorem::SFGM) && !(L && *L > 0.0)) {
    throw Error(ErrorKind::RejectedInput,
                std::string(theorem_name(theorem)) + " bound needs the fixed L of the run");
  }
}

double BoundAccumulator::add(int k, double L_next, double alpha_next, double A_next, double delta,
                             double delta_tilde) {
  if (!(A_next > 0.0)) throw Error(ErrorKind::RejectedInput, "A_{k+1} must be positive");
  const double N = static_cast<double>(k + 1);
  switch (theorem_) {
    case Theorem::GM:
      sum_dt_ += delta_tilde;
      sum_d_ += 2.0 * alpha_next * delta;
      main_ = r2_ / A_next;
      dt_term_ = sum_dt_ / A_next;
      d_term_ = sum_d_ / A_next;
      break;
    case Theorem::FGM:
      sum_dt_ += delta_tilde;
      sum_d_ += 2.0 * A_next * delta;
      main_ = r2_ / A_next;
      dt_term_ = sum_dt_ / A_next;
      d_term_ = sum_d_ / A_next;
      break;
    case Theorem::GMRelative:
      // Stated for constant errors; a varying sequence is covered by its max.
      sum_dt_ = std::max(sum_dt_, delta_tilde);
      sum_d_ = std::max(sum_d_, delta);
      main_ = *L_ * r2_ / N;
      dt_term_ = sum_dt_;
      d_term_ = sum_d_;
      break;
    case Theorem::PDGM:
      sum_d_ += 2.0 * delta / L_next;
      main_ = r2_ / A_next;
      dt_term_ = 0.0;
      d_term_ = sum_d_ / A_next;
      break;
    case Theorem::PDFGM:
      sum_d_ += 2.0 * A_next * delta;
      main_ = r2_ / A_next;
      dt_term_ = 0.0;
      d_term_ = sum_d_ / A_next;
      break;
    case Theorem::SFGM:
      sum_d_ += A_next * delta;
      main_ = 4.0 * *L_ * r2_ / (N * N);
      dt_term_ = 0.0;
      d_term_ = sum_d_ / A_next;
      break;
  }
  return main_ + dt_term_ + d_term_;
}

BoundReport theoretical_bound(const RunTrace& trace, double r2, Theorem theorem,
                              const BoundInputs& inputs) {
  const auto expected = theorem_for(trace.method);
  if (!expected || *expected != theorem) {
    throw Error(ErrorKind::RejectedInput, std::string("theorem '") + theorem_name(theorem) +
                                              "' does not match solver '" + method_name(trace.method) + "'");
  }
  if (trace.records.empty()) throw Error(ErrorKind::RejectedInput, "trace has no iterations");
  std::optional<double> L = inputs.L ? inputs.L : trace.L_fixed;
  BoundAccumulator acc(theorem, r2, L);
  BoundReport report;
  report.theorem = theorem;
  report.r2 = r2;
  report.per_iteration.reserve(trace.records.size());
  auto pick = [](const std::vector<double>& seq, std::size_t k, double fallback) {
    if (seq.empty()) return fallback;
    return seq[std::min(k, seq.size() - 1)];
  };
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const IterRecord& r = trace.records[k];
    const double delta = pick(inputs.delta_seq, k, r.delta);
    const double delta_tilde = pick(inputs.delta_tilde_seq, k, r.delta_tilde);
    if (delta < 0.0 || delta_tilde < 0.0) throw Error(ErrorKind::RejectedInput, "error sequences must be nonnegative");
    report.per_iteration.push_back(
        acc.add(static_cast<int>(k), r.L_next, r.alpha_next, r.A_next, delta, delta_tilde));
  }
  report.main_term = acc.main_term();
  report.delta_tilde_term = acc.delta_tilde_term();
  report.delta_term = acc.delta_term();
  return report;
}

}  // namespace modelopt
