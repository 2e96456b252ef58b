#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "modelopt/bench.hpp"
#include "modelopt/cli.hpp"
#include "modelopt/geometry.hpp"
#include "modelopt/subproblem.hpp"

namespace py = pybind11;
using namespace modelopt;

namespace {

const char* kind_token(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RejectedInput: return "rejected_input";
    case ErrorKind::Evaluation: return "evaluation";
    case ErrorKind::Capability: return "capability";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Reproducibility: return "reproducibility";
  }
  return "unknown";
}

Geometry geometry_named(const std::string& name) {
  if (name == "euclidean") return Geometry::euclidean();
  if (name == "entropy") return Geometry::entropy_simplex();
  throw Error(ErrorKind::RejectedInput, "geometry must be 'euclidean' or 'entropy', got '" + name + "'");
}

ProblemParams to_params(const py::dict& raw) {
  ProblemParams params;
  for (const auto& [k, v] : raw) params[py::str(k)] = py::str(v);
  return params;
}

// At most one of box / ball / simplex may be given; none means the whole space.
SimpleSet simple_set(const std::optional<Vector>& lower, const std::optional<Vector>& upper,
                     const std::optional<Vector>& ball_center, std::optional<double> radius, bool simplex,
                     Eigen::Index dim) {
  const int given = (lower || upper) + (ball_center || radius) + simplex;
  if (given > 1) throw Error(ErrorKind::RejectedInput, "pass at most one of box, ball or simplex");
  if (lower || upper) {
    return make_box(lower.value_or(Vector::Constant(dim, -std::numeric_limits<double>::infinity())),
                    upper.value_or(Vector::Constant(dim, std::numeric_limits<double>::infinity())));
  }
  if (ball_center || radius) return make_ball(ball_center.value_or(Vector::Zero(dim)), radius.value_or(1.0));
  if (simplex) return Simplex{dim};
  return WholeSpace{};
}

SubproblemSpec make_spec(const Vector& center, const Vector& g, double a, double b, const std::string& geometry,
                         double l1, FeasibleSet set) {
  SubproblemSpec spec;
  spec.center = center;
  spec.model_weight = a;
  spec.bregman_weight = b;
  spec.model = l1 > 0.0 ? ModelPart::linear_plus_simple(center, g, SimpleConvexFn::l1(l1)) : ModelPart::linear(center, g);
  spec.geometry = geometry_named(geometry);
  spec.set = std::move(set);
  return spec;
}

template <class F>
std::vector<double> column(const RunTrace& trace, F&& field) {
  std::vector<double> out;
  out.reserve(trace.records.size());
  for (const auto& r : trace.records) out.push_back(field(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_modelopt, m) {
  m.doc() = "Gradient methods with inexact models of the objective";

  static py::exception<Error> error(m, "ModeloptError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::handle(error.ptr())(e.what());
      inst.attr("kind") = kind_token(e.kind());
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  py::class_<ProblemInstance>(m, "Problem")
      .def_readonly("name", &ProblemInstance::name)
      .def_readonly("dim", &ProblemInstance::dim)
      .def_readonly("x0", &ProblemInstance::x0)
      .def_readonly("x_star", &ProblemInstance::x_star)
      .def_readonly("z_star", &ProblemInstance::z_star)
      .def_readonly("f_star", &ProblemInstance::f_star)
      .def_readonly("f_star_error", &ProblemInstance::f_star_error)
      .def_readonly("r2", &ProblemInstance::r2)
      .def_readonly("true_L", &ProblemInstance::true_L)
      .def_property_readonly("constrained", &ProblemInstance::constrained)
      .def_property_readonly("stochastic", [](const ProblemInstance& p) { return p.sampler.has_value(); })
      .def("f", [](const ProblemInstance& p, const Vector& x) { return p.f(x); }, py::arg("x"))
      .def("dual", &eval_dual, py::arg("z"), "g(z); raises for problems without a dual evaluator")
      .def("__repr__", [](const ProblemInstance& p) {
        std::ostringstream os;
        os << "<Problem " << p.name << " dim=" << p.dim << ">";
        return os.str();
      });

  m.def("problem_names", &problem_names);
  m.def(
      "build_problem", [](const std::string& name, const py::dict& params) { return build_problem(name, to_params(params)); },
      py::arg("name"), py::arg("params") = py::dict());

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("problem", &RunReport::problem)
      .def_property_readonly("solver", [](const RunReport& r) { return std::string(method_name(r.method)); })
      .def_readonly("gap", &RunReport::gap)
      .def_readonly("gap_bound", &RunReport::gap_bound)
      .def_readonly("duality_gap", &RunReport::duality_gap)
      .def_readonly("final_gap", &RunReport::final_gap)
      .def_readonly("final_bound", &RunReport::final_bound)
      .def_readonly("asserted", &RunReport::asserted)
      .def_readonly("passed", &RunReport::passed)
      .def_readonly("note", &RunReport::note)
      .def_readonly("r2", &RunReport::r2)
      .def_property_readonly("iterations", [](const RunReport& r) { return r.trace.iterations(); })
      .def_property_readonly("x_out", [](const RunReport& r) { return r.trace.x_out; })
      .def_property_readonly("z_out", [](const RunReport& r) { return r.trace.z_out; })
      .def_property_readonly("oracle_calls", [](const RunReport& r) { return r.trace.oracle_calls; })
      .def_property_readonly("samples", [](const RunReport& r) { return r.trace.samples; })
      .def_property_readonly("L", [](const RunReport& r) { return column(r.trace, [](const IterRecord& x) { return x.L_next; }); })
      .def_property_readonly("A", [](const RunReport& r) { return column(r.trace, [](const IterRecord& x) { return x.A_next; }); })
      .def_property_readonly("batch_sizes", [](const RunReport& r) {
        std::vector<std::int64_t> out;
        for (const auto& rec : r.trace.records) out.push_back(rec.m_batch.value_or(0));
        return out;
      });

  m.def(
      "run_benchmark",
      [](const ProblemInstance& problem, const std::string& solver, int iters, double L0, std::optional<std::uint64_t> seed,
         std::vector<double> delta, std::vector<double> delta_tilde, std::optional<double> epsilon_stop,
         std::optional<double> L_fixed, std::size_t batch, double eps, double sigma0_sq) {
        const auto method = parse_method(solver);
        if (!method) throw Error(ErrorKind::RejectedInput, "unknown solver '" + solver + "'");
        RunRequest req;
        req.method = *method;
        req.config.max_iters = iters;
        req.config.L0 = L0;
        req.config.seed = seed;
        req.config.delta_seq = std::move(delta);
        req.config.delta_tilde_seq = std::move(delta_tilde);
        req.config.epsilon_stop = epsilon_stop;
        req.config.eps = eps;
        req.config.sigma0_sq = sigma0_sq;
        req.config.record_timing = false;
        req.L_fixed = L_fixed;
        req.batch = batch;
        py::gil_scoped_release release;
        return run_benchmark(problem, req);
      },
      py::arg("problem"), py::arg("solver"), py::arg("iters") = 100, py::arg("L0") = 1.0, py::arg("seed") = py::none(),
      py::arg("delta") = std::vector<double>{}, py::arg("delta_tilde") = std::vector<double>{},
      py::arg("epsilon_stop") = py::none(), py::arg("L_fixed") = py::none(), py::arg("batch") = 1,
      py::arg("eps") = 1e-3, py::arg("sigma0_sq") = 1.0);

  m.def(
      "holder_L",
      [](double holder_constant, double exponent, double delta) { return holder_L({holder_constant, exponent, delta}); },
      py::arg("holder_constant"), py::arg("exponent"), py::arg("delta") = 0.0);
  m.def("largest_root", &largest_root, py::arg("A"), py::arg("L"));
  m.def(
      "bregman",
      [](const Vector& y, const Vector& x, const std::string& geometry) { return bregman(geometry_named(geometry), y, x); },
      py::arg("y"), py::arg("x"), py::arg("geometry") = "euclidean", "V[y](x)");

  m.def(
      "solve",
      [](const Vector& center, const Vector& g, double a, double b, const std::string& geometry, double l1,
         std::optional<Vector> lower, std::optional<Vector> upper, std::optional<Vector> ball_center,
         std::optional<double> radius, bool simplex) {
        const SimpleSet set = simple_set(lower, upper, ball_center, radius, simplex, center.size());
        return solve(make_spec(center, g, a, b, geometry, l1, to_feasible(set))).point;
      },
      py::arg("center"), py::arg("g"), py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("geometry") = "euclidean",
      py::arg("l1") = 0.0, py::arg("lower") = py::none(), py::arg("upper") = py::none(),
      py::arg("ball_center") = py::none(), py::arg("radius") = py::none(), py::arg("simplex") = false,
      "argmin over the set of a <g, x - center> + a l1 |x|_1 + b V[center](x)");

  m.def(
      "argdual",
      [](const Vector& center, const Vector& g, double a, double b, const Matrix& B, const Vector& c,
         const std::vector<std::string>& senses, std::optional<Vector> lower, std::optional<Vector> upper) {
        AffineConstraints rows;
        rows.B = B;
        rows.c = c;
        for (const auto& s : senses) {
          if (s == "<=") rows.sense.push_back(Sense::LessEqual);
          else if (s == "=" || s == "==") rows.sense.push_back(Sense::Equal);
          else throw Error(ErrorKind::RejectedInput, "row sense must be '<=' or '=', got '" + s + "'");
        }
        const SimpleSet base = simple_set(lower, upper, std::nullopt, std::nullopt, false, center.size());
        const auto sol = argdual(make_spec(center, g, a, b, "euclidean", 0.0, AffineConstrained{base, rows}));
        return py::make_tuple(sol.point, sol.dual->z);
      },
      py::arg("center"), py::arg("g"), py::arg("a"), py::arg("b"), py::arg("B"), py::arg("c"), py::arg("senses"),
      py::arg("lower") = py::none(), py::arg("upper") = py::none(), "returns (x, z)");

  m.def(
      "run_command",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_command(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "runs the bench CLI in process; returns (exit_code, stdout, stderr)");
}
