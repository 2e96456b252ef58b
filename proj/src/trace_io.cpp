#include "modelopt/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace modelopt {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

double to_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::RejectedInput, std::string("malformed ") + what + " value '" + s + "'");
  }
}

std::int64_t to_int(const std::string& s, const char* what) {
  const double v = to_double(s, what);
  if (v != std::floor(v)) throw Error(ErrorKind::RejectedInput, std::string("non-integer ") + what + " '" + s + "'");
  return static_cast<std::int64_t>(v);
}

std::optional<double> opt_double(const std::string& s, const char* what) {
  if (s.empty()) return std::nullopt;
  return to_double(s, what);
}

std::string cell(double v) { return std::isnan(v) ? "" : format_double(v); }

nlohmann::json vec_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// NaN and infinities have no JSON literal.
nlohmann::json num_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

OutputPaths OutputPaths::from_trace(const std::string& trace_path) {
  std::string stem = trace_path;
  if (stem.size() > 4 && stem.compare(stem.size() - 4, 4, ".csv") == 0) stem.resize(stem.size() - 4);
  return {trace_path, stem + ".summary.json", stem + ".bound.txt", stem + ".iterates.csv"};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_csv(const RunReport& report) {
  std::ostringstream os;
  os << kTraceHeader << '\n';
  const auto& recs = report.trace.records;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const IterRecord& r = recs[k];
    os << r.k << ',' << r.i_k << ',' << format_double(r.L_next) << ',' << format_double(r.alpha_next) << ','
       << format_double(r.A_next) << ',' << cell(r.f_x) << ',' << cell(r.f_bar) << ',';
    if (k < report.gap_bound.size()) os << format_double(report.gap_bound[k]);
    os << ',';
    if (k < report.duality_gap.size()) os << format_double(report.duality_gap[k]);
    os << ',';
    if (r.m_batch) os << *r.m_batch;
    os << ',' << r.oracle_calls << ',';
    if (r.wall_ns > 0) os << r.wall_ns;
    os << '\n';
  }
  return os.str();
}

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kTraceHeader) {
    throw Error(ErrorKind::RejectedInput, "trace CSV header does not match the expected columns");
  }
  std::vector<TraceRow> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto c = split_csv_line(lines[li]);
    if (c.size() != 12) {
      throw Error(ErrorKind::RejectedInput, "trace CSV line " + std::to_string(li + 1) + " has " +
                                                std::to_string(c.size()) + " fields, expected 12");
    }
    TraceRow r;
    r.k = static_cast<int>(to_int(c[0], "k"));
    r.i_k = static_cast<int>(to_int(c[1], "i_k"));
    r.L_next = to_double(c[2], "L_next");
    r.alpha_next = to_double(c[3], "alpha_next");
    r.A_next = to_double(c[4], "A_next");
    r.f_x = opt_double(c[5], "f_x");
    r.f_bar = opt_double(c[6], "f_bar");
    r.gap_bound = opt_double(c[7], "gap_bound");
    r.duality_gap = opt_double(c[8], "duality_gap");
    if (!c[9].empty()) r.m_batch = to_int(c[9], "m_batch");
    r.oracle_calls = to_int(c[10], "oracle_calls");
    if (!c[11].empty()) r.wall_ns = to_int(c[11], "wall_ns");
    rows.push_back(r);
  }
  return rows;
}

std::string iterates_csv(const RunReport& report) {
  const auto& recs = report.trace.records;
  std::ostringstream os;
  const Eigen::Index n = report.trace.x0.size();
  const Eigen::Index m = !recs.empty() && recs.front().z ? recs.front().z->size() : 0;
  os << 'k';
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i;
  for (Eigen::Index i = 0; i < m; ++i) os << ",z" << i;
  os << '\n';
  for (const IterRecord& r : recs) {
    if (r.x.size() != n) {
      throw Error(ErrorKind::RejectedInput, "iterates were not kept; rerun with keep_iterates");
    }
    os << r.k;
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(r.x[i]);
    for (Eigen::Index i = 0; i < m; ++i) os << ',' << format_double((*r.z)[i]);
    os << '\n';
  }
  return os.str();
}

IterateRows parse_iterates_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw Error(ErrorKind::RejectedInput, "empty iterates file");
  const auto header = split_csv_line(lines.front());
  Eigen::Index n = 0, m = 0;
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i].rfind('x', 0) == 0) ++n;
    else if (header[i].rfind('z', 0) == 0) ++m;
    else throw Error(ErrorKind::RejectedInput, "unexpected iterates column '" + header[i] + "'");
  }
  IterateRows out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto c = split_csv_line(lines[li]);
    if (static_cast<Eigen::Index>(c.size()) != 1 + n + m) {
      throw Error(ErrorKind::RejectedInput, "iterates line " + std::to_string(li + 1) + " has the wrong width");
    }
    Vector x(n), z(m);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = to_double(c[1 + i], "x");
    for (Eigen::Index i = 0; i < m; ++i) z[i] = to_double(c[1 + n + i], "z");
    out.x.push_back(std::move(x));
    if (m > 0) out.z.push_back(std::move(z));
  }
  return out;
}

std::string summary_json(const RunReport& report, const ProblemInstance& problem) {
  nlohmann::ordered_json j;
  const RunTrace& tr = report.trace;
  j["solver"] = method_name(report.method);
  j["problem"] = report.problem;
  j["N"] = tr.iterations();
  j["final_gap"] = num_json(report.final_gap);
  j["final_bound"] = num_json(report.final_bound);
  j["passed"] = report.passed;
  j["asserted"] = report.asserted;
  j["note"] = report.note;
  j["params"] = problem.params;
  j["f_star"] = problem.f_star;
  j["f_star_error"] = problem.f_star_error;
  j["r2"] = report.r2;
  j["L0"] = tr.L0;
  j["L_fixed"] = tr.L_fixed ? num_json(*tr.L_fixed) : nlohmann::json(nullptr);
  j["A_N"] = tr.A_N();
  j["x_out"] = vec_json(tr.x_out);
  j["z_bar"] = tr.z_out ? vec_json(*tr.z_out) : nlohmann::json(nullptr);
  j["oracle_calls"] = tr.oracle_calls;
  j["value_calls"] = tr.value_calls;
  j["inner_trials"] = tr.inner_trials;
  j["samples"] = tr.samples;
  j["stopped_early"] = tr.stopped_early;
  if (report.bound) {
    j["bound_terms"] = {{"main", report.bound->main_term},
                        {"delta_tilde", report.bound->delta_tilde_term},
                        {"delta", report.bound->delta_term}};
  }
  return j.dump(2) + "\n";
}

std::string bound_report_text(const RunReport& report) {
  std::ostringstream os;
  os << "solver " << method_name(report.method) << "\nproblem " << report.problem << '\n';
  os << "iterations " << report.trace.iterations() << '\n';
  if (!report.bound) {
    os << "theorem none\n" << report.note << '\n';
    return os.str();
  }
  const BoundReport& b = *report.bound;
  os << "theorem " << theorem_name(b.theorem) << '\n';
  os << "r2 " << format_double(b.r2) << '\n';
  os << "A_N " << format_double(report.trace.A_N()) << '\n';
  os << "main_term " << format_double(b.main_term) << '\n';
  os << "delta_tilde_term " << format_double(b.delta_tilde_term) << '\n';
  os << "delta_term " << format_double(b.delta_term) << '\n';
  os << "final_bound " << format_double(report.final_bound) << '\n';
  os << "final_gap " << format_double(report.final_gap) << '\n';
  os << "asserted " << (report.asserted ? "yes" : "no") << '\n';
  os << "result " << (report.passed ? "PASS" : "FAIL") << '\n';
  if (!report.note.empty()) os << "note " << report.note << '\n';
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::RejectedInput, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::RejectedInput, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::RejectedInput, "write failed for " + path);
}

void write_outputs(const RunReport& report, const ProblemInstance& problem, const std::string& trace_path) {
  const OutputPaths paths = OutputPaths::from_trace(trace_path);
  write_file(paths.trace, trace_csv(report));
  write_file(paths.summary, summary_json(report, problem));
  write_file(paths.bound, bound_report_text(report));
  write_file(paths.iterates, iterates_csv(report));
}

Recomputed recompute_outputs(Method method, const std::vector<TraceRow>& rows, const IterateRows& iterates) {
  if (rows.empty() || rows.size() != iterates.x.size()) {
    throw Error(ErrorKind::RejectedInput, "trace and iterates disagree on the number of iterations");
  }
  Recomputed out;
  out.A_N = rows.back().A_next;
  const Eigen::Index n = iterates.x.front().size();
  switch (method) {
    case Method::GM:
    case Method::PDGM: {
      Vector w = Vector::Zero(n);
      double A = 0.0;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        A += rows[k].alpha_next;
        w += rows[k].alpha_next * iterates.x[k];
      }
      out.x_out = w / A;
      break;
    }
    case Method::GMRelative: {
      Vector s = Vector::Zero(n);
      for (const Vector& x : iterates.x) s += x;
      out.x_out = s / static_cast<double>(iterates.x.size());
      break;
    }
    default:
      out.x_out = iterates.x.back();
  }
  if (!iterates.z.empty()) {
    Vector s = Vector::Zero(iterates.z.front().size());
    for (std::size_t k = 0; k < rows.size(); ++k) s += rows[k].alpha_next * iterates.z[k];
    out.z_bar = s / out.A_N;
  }
  return out;
}

}  // namespace modelopt
