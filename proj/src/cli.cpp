#include "modelopt/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "modelopt/trace_io.hpp"

namespace modelopt {

namespace {

using json = nlohmann::json;

struct RunOptions {
  std::string problem;
  std::string solver;
  int iters = 100;
  std::optional<double> l0;
  std::vector<double> delta;
  std::vector<double> delta_tilde;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
  std::optional<double> sigma0;
  std::optional<std::size_t> batch;
  std::optional<double> r2;
  std::optional<double> epsilon_stop;
  std::vector<std::string> params;
  std::string out;
  bool timing = false;
};

std::vector<double> number_list(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw Error(ErrorKind::RejectedInput, "config: " + key + " must hold numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  throw Error(ErrorKind::RejectedInput, "config: " + key + " must be a number or a list of numbers");
}

std::string param_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : ",") + param_value(e);
    return s;
  }
  throw Error(ErrorKind::RejectedInput, "config: unsupported parameter value " + v.dump());
}

// Fills fields of `o` that the command line did not set.
void apply_config(const json& j, RunOptions& o, const CLI::App* app) {
  if (!j.is_object()) throw Error(ErrorKind::RejectedInput, "config: a run entry must be an object");
  auto given = [&](const char* flag) { return app && app->count(flag) > 0; };
  static const std::set<std::string> known = {"problem", "solver", "iters", "l0", "delta", "delta_tilde",
                                              "seed", "seeds", "eps", "sigma0", "batch", "r2",
                                              "epsilon_stop", "params", "out", "timing"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw Error(ErrorKind::RejectedInput, "config: unknown key '" + k + "'");
  }
  try {
    if (j.contains("problem") && !given("--problem")) o.problem = j["problem"].get<std::string>();
    if (j.contains("solver") && !given("--solver")) o.solver = j["solver"].get<std::string>();
    if (j.contains("iters") && !given("--iters")) o.iters = j["iters"].get<int>();
    if (j.contains("l0") && !given("--l0")) o.l0 = j["l0"].get<double>();
    if (j.contains("delta") && !given("--delta")) o.delta = number_list(j["delta"], "delta");
    if (j.contains("delta_tilde") && !given("--delta-tilde")) o.delta_tilde = number_list(j["delta_tilde"], "delta_tilde");
    if (j.contains("seed") && !given("--seed")) o.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("eps") && !given("--eps")) o.eps = j["eps"].get<double>();
    if (j.contains("sigma0") && !given("--sigma0")) o.sigma0 = j["sigma0"].get<double>();
    if (j.contains("batch") && !given("--batch")) o.batch = j["batch"].get<std::size_t>();
    if (j.contains("r2") && !given("--r2")) o.r2 = j["r2"].get<double>();
    if (j.contains("epsilon_stop") && !given("--epsilon-stop")) o.epsilon_stop = j["epsilon_stop"].get<double>();
    if (j.contains("out") && !given("--out")) o.out = j["out"].get<std::string>();
    if (j.contains("timing") && !given("--timing")) o.timing = j["timing"].get<bool>();
    if (j.contains("params") && !given("--param")) {
      if (!j["params"].is_object()) throw Error(ErrorKind::RejectedInput, "config: params must be an object");
      for (const auto& [k, v] : j["params"].items()) o.params.push_back(k + "=" + param_value(v));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::RejectedInput, std::string("config: ") + e.what());
  }
}

RunRequest to_request(const RunOptions& o) {
  const auto method = parse_method(o.solver);
  if (!method) throw Error(ErrorKind::RejectedInput, "unknown solver '" + o.solver + "'");
  RunRequest r;
  r.method = *method;
  SolverConfig& c = r.config;
  c.max_iters = o.iters;
  c.delta_seq = o.delta;
  c.delta_tilde_seq = o.delta_tilde;
  c.seed = o.seed;
  c.record_timing = o.timing;
  if (o.eps) c.eps = *o.eps;
  if (o.sigma0) c.sigma0_sq = *o.sigma0 * *o.sigma0;
  if (o.batch) r.batch = *o.batch;
  r.r2 = o.r2;
  if (o.l0) {
    if (*method == Method::GMRelative || *method == Method::SFGM) r.L_fixed = *o.l0;
    else c.L0 = *o.l0;
  }
  if (o.epsilon_stop) {
    c.epsilon_stop = o.epsilon_stop;
  }
  return r;
}

json report_json(const RunReport& rep, const ProblemInstance& P) { return json::parse(summary_json(rep, P)); }

RunReport execute(const RunOptions& o, const ProblemInstance& P) {
  RunRequest req = to_request(o);
  if (req.config.epsilon_stop) req.config.r2_for_stop = req.r2.value_or(P.r2);
  if (req.method == Method::SFGM || req.method == Method::GMRelative) {
    if (!req.L_fixed) req.L_fixed = P.true_L;
    req.config.L0 = *req.L_fixed;
  }
  return run_benchmark(P, req);
}

int cmd_run(const RunOptions& o, std::ostream& out) {
  const ProblemInstance P = build_problem(o.problem, parse_params(o.params));
  const RunReport rep = execute(o, P);
  if (!o.out.empty()) write_outputs(rep, P, o.out);
  out << summary_json(rep, P);
  return rep.passed ? 0 : 1;
}

struct VerifyOptions {
  std::string trace;
  std::string theorem;
  double r2 = 0.0;
  std::vector<double> delta;
  std::vector<double> delta_tilde;
  std::optional<double> l0;
  std::optional<double> fstar;
};

Method method_of(Theorem t) {
  switch (t) {
    case Theorem::GM: return Method::GM;
    case Theorem::FGM: return Method::FGM;
    case Theorem::GMRelative: return Method::GMRelative;
    case Theorem::PDGM: return Method::PDGM;
    case Theorem::PDFGM: return Method::PDFGM;
    case Theorem::SFGM: return Method::SFGM;
  }
  return Method::GM;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  const auto theorem = parse_theorem(o.theorem);
  if (!theorem) throw Error(ErrorKind::RejectedInput, "unknown theorem '" + o.theorem + "'");
  const Method method = method_of(*theorem);
  const auto rows = parse_trace_csv(read_file(o.trace));
  if (rows.empty()) throw Error(ErrorKind::RejectedInput, "trace has no rows");
  const OutputPaths paths = OutputPaths::from_trace(o.trace);
  std::optional<json> summary;
  if (std::filesystem::exists(paths.summary)) summary = json::parse(read_file(paths.summary));

  bool ok = true;
  auto line = [&](const std::string& what, bool pass, const std::string& detail) {
    out << (pass ? "PASS " : "FAIL ") << what << (detail.empty() ? "" : ": " + detail) << '\n';
    ok = ok && pass;
  };

  // Recurrences.
  {
    double worst = 0.0;
    double A = 0.0;
    const bool fast = method == Method::FGM || method == Method::PDFGM || method == Method::SFGM;
    for (const TraceRow& r : rows) {
      A += r.alpha_next;
      worst = std::max(worst, std::abs(A - r.A_next) / std::max(1.0, r.A_next));
      if (fast) worst = std::max(worst, std::abs(r.L_next * r.alpha_next * r.alpha_next - r.A_next) / r.A_next);
      else if (method != Method::GMRelative) worst = std::max(worst, std::abs(r.alpha_next * r.L_next - 1.0));
    }
    line("recurrences", worst <= 1e-9, "max relative defect " + format_double(worst));
  }

  // Bound recomputed from the trace columns.
  RunTrace tr;
  tr.method = method;
  for (const TraceRow& r : rows) {
    IterRecord rec;
    rec.k = r.k;
    rec.L_next = r.L_next;
    rec.alpha_next = r.alpha_next;
    rec.A_next = r.A_next;
    tr.records.push_back(rec);
  }
  if (method == Method::GMRelative || method == Method::SFGM) tr.L_fixed = o.l0.value_or(rows.front().L_next);
  BoundInputs inputs;
  inputs.delta_seq = o.delta;
  inputs.delta_tilde_seq = o.delta_tilde;
  const BoundReport bound = theoretical_bound(tr, o.r2, *theorem, inputs);

  double f_star = 0.0, f_star_error = 0.0;
  const bool pd = is_primal_dual(method);
  bool have_gap = pd;
  if (!pd) {
    if (o.fstar) {
      f_star = *o.fstar;
      have_gap = true;
    } else if (summary && (*summary)["f_star"].is_number()) {
      f_star = (*summary)["f_star"].get<double>();
      f_star_error = (*summary)["f_star_error"].get<double>();
      have_gap = true;
    }
  }
  if (!have_gap) {
    line("gap", false, "no f_* available: pass --fstar or keep the summary file next to the trace");
  } else {
    const bool averaged = method == Method::GM || method == Method::GMRelative;
    const double tol = bound_tolerance(f_star);
    std::string detail;
    bool pass = true;
    for (std::size_t k = 0; k < rows.size() && pass; ++k) {
      const auto& v = pd ? rows[k].duality_gap : (averaged ? rows[k].f_bar : rows[k].f_x);
      if (!v) {
        pass = false;
        detail = "missing gap column at k = " + std::to_string(k);
        break;
      }
      const double gap = pd ? *v : *v - f_star + f_star_error;
      if (!(gap <= bound.per_iteration[k] + tol)) {
        pass = false;
        detail = "gap " + format_double(gap) + " > bound " + format_double(bound.per_iteration[k]) +
                 " at N = " + std::to_string(k + 1);
      }
    }
    if (pass) {
      const auto& v = pd ? rows.back().duality_gap : (averaged ? rows.back().f_bar : rows.back().f_x);
      detail = "final gap " + format_double(pd ? *v : *v - f_star) + " <= bound " + format_double(bound.total());
    }
    line("bound", pass, detail);
  }

  // Round trip of the averaged outputs against the summary.
  if (summary && std::filesystem::exists(paths.iterates)) {
    const Recomputed rc = recompute_outputs(method, rows, parse_iterates_csv(read_file(paths.iterates)));
    double worst = std::abs(rc.A_N - (*summary)["A_N"].get<double>());
    const auto xs = (*summary)["x_out"].get<std::vector<double>>();
    for (std::size_t i = 0; i < xs.size() && i < static_cast<std::size_t>(rc.x_out.size()); ++i) {
      worst = std::max(worst, std::abs(rc.x_out[static_cast<Eigen::Index>(i)] - xs[i]));
    }
    if (rc.z_bar && (*summary)["z_bar"].is_array()) {
      const auto zs = (*summary)["z_bar"].get<std::vector<double>>();
      for (std::size_t i = 0; i < zs.size(); ++i) worst = std::max(worst, std::abs((*rc.z_bar)[static_cast<Eigen::Index>(i)] - zs[i]));
    }
    line("round-trip", worst <= 1e-12, "max deviation " + format_double(worst));
  }
  out << (ok ? "verify: PASS" : "verify: FAIL") << '\n';
  return ok ? 0 : 1;
}

int cmd_suite(const std::string& config_path, const std::string& out_dir_flag, std::ostream& out) {
  struct Job {
    RunOptions options;
  };
  std::vector<Job> jobs;
  std::string out_dir = out_dir_flag;
  if (!config_path.empty()) {
    json j;
    try {
      j = json::parse(read_file(config_path));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::RejectedInput, std::string("config: ") + e.what());
    }
    if (out_dir.empty() && j.contains("output_dir")) out_dir = j["output_dir"].get<std::string>();
    if (!j.contains("runs") || !j["runs"].is_array()) throw Error(ErrorKind::RejectedInput, "config: 'runs' list is required");
    for (const auto& entry : j["runs"]) {
      RunOptions o;
      apply_config(entry, o, nullptr);
      if (entry.contains("seeds")) {
        for (const auto& s : entry["seeds"]) {
          RunOptions os = o;
          os.seed = s.get<std::uint64_t>();
          jobs.push_back({os});
        }
      } else {
        jobs.push_back({o});
      }
    }
  } else {
    for (const SuiteEntry& e : default_suite()) {
      RunOptions o;
      o.problem = e.problem;
      o.solver = method_name(e.request.method);
      o.iters = e.request.config.max_iters;
      o.eps = e.request.config.eps;
      o.sigma0 = std::sqrt(e.request.config.sigma0_sq);
      for (const auto& [k, v] : e.params) o.params.push_back(k + "=" + v);
      if (e.request.method == Method::SFGM) o.batch = e.request.batch;
      jobs.push_back({o});
    }
  }
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  bool all = true;
  json results = json::array();
  for (Job& job : jobs) {
    RunOptions& o = job.options;
    if (o.out.empty() && !out_dir.empty()) {
      o.out = (std::filesystem::path(out_dir) /
               (o.problem + "_" + o.solver + (o.seed ? "_s" + std::to_string(*o.seed) : "") + ".csv"))
                  .string();
    }
    const ProblemInstance P = build_problem(o.problem, parse_params(o.params));
    const RunReport rep = execute(o, P);
    if (!o.out.empty()) write_outputs(rep, P, o.out);
    all = all && rep.passed;
    json r = report_json(rep, P);
    json brief = {{"solver", r["solver"]}, {"problem", r["problem"]}, {"N", r["N"]}, {"final_gap", r["final_gap"]},
                  {"final_bound", r["final_bound"]}, {"passed", r["passed"]}, {"asserted", r["asserted"]},
                  {"oracle_calls", r["oracle_calls"]}};
    if (!o.out.empty()) brief["trace"] = o.out;
    results.push_back(brief);
  }
  json summary = {{"runs", results}, {"passed", all}};
  out << summary.dump(2) << '\n';
  return all ? 0 : 1;
}

void add_run_flags(CLI::App* cmd, RunOptions& o) {
  std::vector<std::string> names;
  for (Method m : {Method::GM, Method::FGM, Method::GMRelative, Method::PDGM, Method::PDFGM, Method::SFGM, Method::ASFGM}) {
    names.emplace_back(method_name(m));
  }
  cmd->add_option("--problem", o.problem, "suite problem name")->check(CLI::IsMember(problem_names()));
  cmd->add_option("--solver", o.solver, "solver name")->check(CLI::IsMember(names));
  cmd->add_option("--iters", o.iters, "iteration count N")->check(CLI::PositiveNumber);
  cmd->add_option("--l0", o.l0, "initial L (fixed L for gm-rel and sfgm)");
  cmd->add_option("--delta", o.delta, "delta_k sequence (last value repeats)")->delimiter(',');
  cmd->add_option("--delta-tilde", o.delta_tilde, "delta-tilde_k sequence")->delimiter(',');
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--eps", o.eps, "asfgm accuracy parameter");
  cmd->add_option("--sigma0", o.sigma0, "asfgm noise scale sigma0");
  cmd->add_option("--batch", o.batch, "sfgm mini-batch size");
  cmd->add_option("--r2", o.r2, "R^2 for the bound (default: the problem's)");
  cmd->add_option("--epsilon-stop", o.epsilon_stop, "stop when the bound drops below this");
  cmd->add_option("--param", o.params, "problem parameter key=value (repeatable)");
  cmd->add_option("--out", o.out, "trace CSV path");
  cmd->add_flag("--timing", o.timing, "record wall_ns");
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inexact-model first-order solvers: runs, bound verification and suites", "modelopt-bench"};
  app.require_subcommand(1);

  RunOptions run_opts;
  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "run one solver on one problem");
  add_run_flags(run, run_opts);
  run->add_option("--config", run_config, "JSON file with run options");

  VerifyOptions ver;
  CLI::App* verify = app.add_subcommand("verify", "recompute a theorem bound from a trace CSV");
  verify->add_option("--trace", ver.trace, "trace CSV")->required();
  verify->add_option("--theorem", ver.theorem, "gm, fgm, gm-rel, pd-gm, pd-fgm or sfgm")->required();
  verify->add_option("--r2", ver.r2, "R^2")->required();
  verify->add_option("--delta", ver.delta, "delta_k sequence")->delimiter(',');
  verify->add_option("--delta-tilde", ver.delta_tilde, "delta-tilde_k sequence")->delimiter(',');
  verify->add_option("--l0", ver.l0, "fixed L for gm-rel / sfgm (default: the trace's)");
  verify->add_option("--fstar", ver.fstar, "optimal value (default: from the summary file)");

  std::string suite_config, suite_out;
  CLI::App* suite = app.add_subcommand("suite", "run a list of (problem, solver) pairs");
  suite->add_option("--config", suite_config, "JSON suite file (default: built-in suite)");
  suite->add_option("--out", suite_out, "output directory");

  std::vector<std::string> argv_store;
  argv_store.emplace_back("modelopt-bench");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (run->parsed()) {
      if (!run_config.empty()) {
        json j;
        try {
          j = json::parse(read_file(run_config));
        } catch (const json::exception& e) {
          throw Error(ErrorKind::RejectedInput, std::string("config: ") + e.what());
        }
        apply_config(j, run_opts, run);
      }
      if (run_opts.problem.empty() || run_opts.solver.empty()) {
        err << "error: --problem and --solver are required (flag or config)\n\n" << run->help();
        return 2;
      }
      if (!parse_method(run_opts.solver)) {
        err << "error: unknown solver '" << run_opts.solver << "'\n\n" << run->help();
        return 2;
      }
      return cmd_run(run_opts, out);
    }
    if (verify->parsed()) return cmd_verify(ver, out);
    return cmd_suite(suite_config, suite_out, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == ErrorKind::RejectedInput ? 2 : 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace modelopt
