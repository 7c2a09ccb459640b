#include <pybind11/eigen.h>
#include <pybind11/gil_safe_call_once.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "teachdim/bounds.hpp"
#include "teachdim/construct.hpp"
#include "teachdim/error.hpp"
#include "teachdim/io.hpp"
#include "teachdim/kkt.hpp"
#include "teachdim/lambert.hpp"
#include "teachdim/oracle.hpp"
#include "teachdim/solvers.hpp"
#include "teachdim/verify.hpp"

namespace py = pybind11;
using namespace teachdim;

namespace {

LearnerSpec make_spec(const std::string& loss, bool homogeneous, double lambda,
                      const std::optional<Matrix>& regularizer) {
  std::optional<PsdMatrix> reg;
  if (regularizer) reg = PsdMatrix(*regularizer);
  return LearnerSpec(parse_loss(loss), homogeneous, lambda, reg);
}

Goal parse_goal(const std::string& g) {
  if (g == "parameter") return Goal::exact_parameter;
  if (g == "boundary") return Goal::decision_boundary;
  throw Error(errc::invalid_option, "goal must be 'parameter' or 'boundary'");
}

VerifyConfig verify_config(int restarts, std::uint64_t seed) {
  VerifyConfig cfg;
  cfg.restarts = restarts;
  cfg.solver.seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Teaching sets for ridge regression, SVM and logistic regression";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::object(py::exception<Error>(m, "TeachdimError", PyExc_ValueError)); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& type = error_type.get_stored();
      py::object inst = type(e.what());
      inst.attr("code") = e.code();
      PyErr_SetObject(type.ptr(), inst.ptr());
    }
  });

  py::class_<LearnerSpec>(m, "LearnerSpec")
      .def(py::init(&make_spec), py::arg("loss"), py::arg("homogeneous") = true, py::arg("lam") = 1.0,
           py::arg("regularizer") = std::nullopt)
      .def_property_readonly("loss", [](const LearnerSpec& s) { return to_string(s.loss()); })
      .def_property_readonly("homogeneous", &LearnerSpec::homogeneous)
      .def_property_readonly("lam", &LearnerSpec::lambda)
      .def("__repr__", [](const LearnerSpec& s) {
        return "LearnerSpec(loss='" + to_string(s.loss()) + "', homogeneous=" + (s.homogeneous() ? "True" : "False") +
               ", lam=" + std::to_string(s.lambda()) + ")";
      });

  py::class_<TargetModel>(m, "TargetModel")
      .def(py::init([](Vector w, std::optional<double> b, const std::string& goal) {
             return TargetModel{std::move(w), b, parse_goal(goal)};
           }),
           py::arg("weights"), py::arg("bias") = std::nullopt, py::arg("goal") = "parameter")
      .def_readonly("weights", &TargetModel::weights)
      .def_readonly("bias", &TargetModel::bias)
      .def_property_readonly("effective", &TargetModel::effective);

  py::class_<Example>(m, "Example")
      .def(py::init<Vector, double>(), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Example::x)
      .def_readwrite("y", &Example::y)
      .def("__repr__", [](const Example& e) { return "Example(y=" + std::to_string(e.y) + ")"; });

  py::class_<TeachingSet>(m, "TeachingSet")
      .def(py::init<>())
      .def_readwrite("items", &TeachingSet::items)
      .def_readwrite("provenance", &TeachingSet::provenance)
      .def_readwrite("scale_factor", &TeachingSet::scale_factor)
      .def("__len__", [](const TeachingSet& s) { return s.items.size(); })
      .def("to_json", [](const TeachingSet& s) { return io::to_json(s).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return io::teaching_set_from_json(io::Json::parse(text));
      });

  py::class_<TdValue>(m, "TdValue")
      .def_readonly("lo", &TdValue::lo)
      .def_readonly("hi", &TdValue::hi)
      .def_property_readonly("exact", &TdValue::exact);

  py::class_<BoundReport>(m, "BoundReport")
      .def_readonly("lb1", &BoundReport::lb1)
      .def_readonly("lb2", &BoundReport::lb2)
      .def_readonly("lb3", &BoundReport::lb3)
      .def_readonly("combined", &BoundReport::combined)
      .def_readonly("td", &BoundReport::td)
      .def("to_json", [](const BoundReport& r) { return io::to_json(r).dump(); });

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("theta", &SolveResult::theta)
      .def_readonly("objective_value", &SolveResult::objective_value)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("converged", &SolveResult::converged)
      .def_readonly("unique", &SolveResult::unique);

  py::class_<VerifyReport>(m, "VerifyReport")
      .def_readonly("passed", &VerifyReport::passed)
      .def_readonly("kkt_residual", &VerifyReport::kkt_residual)
      .def_readonly("recovery_distance", &VerifyReport::recovery_distance)
      .def_readonly("objective_gap", &VerifyReport::objective_gap)
      .def_readonly("uniqueness_spread", &VerifyReport::uniqueness_spread)
      .def_readonly("trained_theta", &VerifyReport::trained_theta)
      .def_readonly("boundary_agreement", &VerifyReport::boundary_agreement)
      .def("to_json", [](const VerifyReport& r) { return io::to_json(r).dump(); });

  py::class_<FalsificationReport>(m, "FalsificationReport")
      .def_readonly("trials", &FalsificationReport::trials)
      .def_readonly("size_tested", &FalsificationReport::size_tested)
      .def_readonly("successes", &FalsificationReport::successes)
      .def_readonly("box_radius", &FalsificationReport::box_radius)
      .def_readonly("seed", &FalsificationReport::seed)
      .def_readonly("sampled_region", &FalsificationReport::sampled_region);

  m.def("lambert_w0", &lambert_w0, py::arg("x"));
  m.def("tau_max", &tau_max);
  m.def("tau_inverse", &tau_inverse, py::arg("a"));
  m.def("tau_inverse_bisection", &tau_inverse_bisection, py::arg("a"));

  m.def("lb1", &lb1, py::arg("spec"), py::arg("target"));
  m.def("lb2", &lb2, py::arg("spec"), py::arg("target"));
  m.def("lb3", &lb3, py::arg("spec"), py::arg("target"));
  m.def("lower_bound", &lower_bound, py::arg("spec"), py::arg("target"));
  m.def("td_formula", &td_formula, py::arg("spec"), py::arg("target"));
  m.def("bound_report", &bound_report, py::arg("spec"), py::arg("target"));

  m.def(
      "teach",
      [](const LearnerSpec& spec, const TargetModel& target, double scale_a, std::optional<Vector> offset,
         std::optional<double> boundary_scale) {
        return teach(spec, target, ConstructionOptions{scale_a, std::move(offset), boundary_scale});
      },
      py::arg("spec"), py::arg("target"), py::arg("scale_a") = 1.0, py::arg("orthogonal_offset") = std::nullopt,
      py::arg("boundary_scale") = std::nullopt);
  m.def("boundary_scale", &boundary_scale, py::arg("spec"), py::arg("target"));

  m.def(
      "train",
      [](const LearnerSpec& spec, const std::vector<Example>& items, Eigen::Index dim, std::uint64_t seed) {
        SolverConfig cfg;
        cfg.seed = seed;
        return train(spec, items, dim, cfg);
      },
      py::arg("spec"), py::arg("items"), py::arg("dim"), py::arg("seed") = SolverConfig{}.seed);
  m.def(
      "kkt_residual",
      [](const LearnerSpec& spec, const std::vector<Example>& items, const Vector& theta) {
        return kkt_residual(spec, items, theta);
      },
      py::arg("spec"), py::arg("items"), py::arg("theta"));
  m.def(
      "objective",
      [](const LearnerSpec& spec, const std::vector<Example>& items, const Vector& theta) {
        return objective(spec, items, theta);
      },
      py::arg("spec"), py::arg("items"), py::arg("theta"));

  m.def(
      "verify_teaching_set",
      [](const LearnerSpec& spec, const std::vector<Example>& items, const TargetModel& target, int restarts,
         std::uint64_t seed) { return verify_teaching_set(spec, items, target, verify_config(restarts, seed)); },
      py::arg("spec"), py::arg("items"), py::arg("target"), py::arg("restarts") = 4,
      py::arg("seed") = SolverConfig{}.seed);
  m.def(
      "verify_construction",
      [](const LearnerSpec& spec, const TargetModel& target, const TeachingSet& set, int restarts,
         std::uint64_t seed) { return verify_construction(spec, target, set, verify_config(restarts, seed)); },
      py::arg("spec"), py::arg("target"), py::arg("teaching_set"), py::arg("restarts") = 4,
      py::arg("seed") = SolverConfig{}.seed);

  m.def(
      "falsify_smaller_sets",
      [](const LearnerSpec& spec, const TargetModel& target, long size, long trials, std::optional<double> box_radius,
         std::uint64_t seed) {
        return falsify_smaller_sets(spec, target, size, trials, box_radius.value_or(default_box_radius(target)),
                                    seed);
      },
      py::arg("spec"), py::arg("target"), py::arg("size"), py::arg("trials"), py::arg("box_radius") = std::nullopt,
      py::arg("seed") = SolverConfig{}.seed);
  m.def("finite_difference_grad_check",
        [](const std::string& loss, int samples, std::uint64_t seed) {
          return finite_difference_grad_check(parse_loss(loss), samples, seed);
        },
        py::arg("loss"), py::arg("samples"), py::arg("seed") = 0);
}
