#pragma once

#include <string>
#include <vector>

#include "modelopt/bench.hpp"

namespace modelopt {

inline constexpr const char* kTraceHeader =
    "k,i_k,L_next,alpha_next,A_next,f_x,f_bar,gap_bound,duality_gap,m_batch,oracle_calls,wall_ns";

/// One parsed trace row; absent fields are nullopt.
struct TraceRow {
  int k = 0;
  int i_k = 0;
  double L_next = 0.0;
  double alpha_next = 0.0;
  double A_next = 0.0;
  std::optional<double> f_x, f_bar, gap_bound, duality_gap;
  std::optional<std::int64_t> m_batch;
  std::int64_t oracle_calls = 0;
  std::optional<std::int64_t> wall_ns;
};

/// Output file names derived from the trace path: "t.csv" gives
/// t.summary.json, t.bound.txt and t.iterates.csv.
struct OutputPaths {
  std::string trace, summary, bound, iterates;
  static OutputPaths from_trace(const std::string& trace_path);
};

std::string format_double(double v);

std::string trace_csv(const RunReport& report);
std::vector<TraceRow> parse_trace_csv(const std::string& text);

/// k, x_{k+1} coordinates, then z_{k+1} coordinates when present.
std::string iterates_csv(const RunReport& report);
struct IterateRows {
  std::vector<Vector> x;
  std::vector<Vector> z;  // empty unless primal-dual
};
IterateRows parse_iterates_csv(const std::string& text);

/// JSON with solver, problem, N, final_gap, final_bound, passed and the
/// outputs needed to re-derive them.
std::string summary_json(const RunReport& report, const ProblemInstance& problem);

std::string bound_report_text(const RunReport& report);

/// Writes all four files. Throws RejectedInput when a file cannot be opened.
void write_outputs(const RunReport& report, const ProblemInstance& problem, const std::string& trace_path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

/// x-bar_N / x_N and z-bar_N recomputed from trace rows and iterates with
/// the averaging formula of the method.
struct Recomputed {
  double A_N = 0.0;
  Vector x_out;
  std::optional<Vector> z_bar;
};
Recomputed recompute_outputs(Method method, const std::vector<TraceRow>& rows, const IterateRows& iterates);

}  // namespace modelopt
