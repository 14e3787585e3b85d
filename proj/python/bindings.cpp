#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include <json.hpp>

#include "genshare/bounds.hpp"
#include "genshare/convex.hpp"
#include "genshare/experiment.hpp"
#include "genshare/forecasters.hpp"
#include "genshare/regret.hpp"
#include "genshare/simplex.hpp"

namespace py = pybind11;
using namespace genshare;

namespace {

py::dict report_dict(const RegretReport& r) {
  py::dict out;
  out["run_id"] = r.run_id;
  out["seed"] = r.seed;
  out["T"] = r.horizon;
  out["d"] = r.d;
  out["regret_kind"] = to_string(r.regret_kind);
  out["regret"] = r.regret;
  out["m"] = r.m;
  out["n"] = r.n;
  out["U_sum"] = r.u_sum;
  out["L_sum"] = r.l_sum;
  out["bound"] = r.bound;
  out["verdict"] = r.pass ? "pass" : "fail";
  out["wall_ms"] = r.wall_ms;
  return out;
}

py::dict trajectory_dict(const Trajectory& t) {
  py::dict out;
  out["p"] = t.p;
  out["v_next"] = t.v_next;
  out["realized"] = t.realized;
  out["eta"] = t.eta;
  out["z"] = t.z;
  return out;
}

}  // namespace

PYBIND11_MODULE(_genshare, m) {
  m.doc() = "Generalized share forecasters, regrets and bounds";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("total_variation", [](const Vector& x, const Vector& y) { return total_variation(x, y); });
  m.def("kl_divergence", [](const Vector& x, const Vector& y) { return kl_divergence(x, y); });
  m.def("binary_entropy", &binary_entropy);
  m.def("kl_project_clipped", [](const Vector& v, double alpha) { return kl_project_clipped(v, alpha); },
        py::arg("v"), py::arg("alpha"));

  py::class_<FixedShare>(m, "FixedShare").def(py::init<double>(), py::arg("alpha")).def_readwrite("alpha", &FixedShare::alpha);
  py::class_<Projected>(m, "Projected").def(py::init<double>(), py::arg("alpha")).def_readwrite("alpha", &Projected::alpha);
  py::class_<BWMax>(m, "BWMax").def(py::init<double>(), py::arg("alpha")).def_readwrite("alpha", &BWMax::alpha);
  py::class_<BWDecayed>(m, "BWDecayed")
      .def(py::init<double, double>(), py::arg("alpha"), py::arg("gamma"))
      .def_readwrite("alpha", &BWDecayed::alpha)
      .def_readwrite("gamma", &BWDecayed::gamma);
  py::class_<TimeVarying>(m, "TimeVarying")
      .def(py::init<Schedule, Schedule>(), py::arg("eta"), py::arg("alpha"));
  m.def("corollary7_rule", &corollary7_rule, py::arg("d"),
        "Decreasing schedules eta_t = sqrt(ln(d t)/t), alpha_t = 1/t.");

  py::class_<Forecaster>(m, "Forecaster")
      .def(py::init([](MixingRule rule, double eta, std::size_t d) { return Forecaster(std::move(rule), eta, d); }),
           py::arg("rule"), py::arg("eta"), py::arg("d"))
      .def_property_readonly("weights", [](const Forecaster& f) { return Vector(f.weights().begin(), f.weights().end()); })
      .def_property_readonly("round", &Forecaster::round)
      .def("step", [](Forecaster& f, const Vector& loss) { return f.step(loss).realized_loss; },
           py::arg("loss"), "Plays the current weights against `loss`; returns the realized loss.");

  m.def("run_forecaster",
        [](const MixingRule& rule, double eta, const std::vector<Vector>& losses) {
          return trajectory_dict(run_forecaster(rule, eta, losses));
        },
        py::arg("rule"), py::arg("eta"), py::arg("losses"));

  m.def("shifting_regret",
        [](const Vector& realized, const std::vector<Vector>& losses, const ComparatorSequence& u) {
          return generalized_shifting_regret(realized, losses, u);
        });
  m.def("adaptive_regret", [](const Vector& realized, const std::vector<Vector>& losses, std::size_t tau0) {
    const auto r = adaptive_regret(realized, losses, tau0);
    return py::make_tuple(r.value, r.first, r.last, r.corner);
  });
  m.def("discounted_regret", [](const Vector& realized, const std::vector<Vector>& losses, const Vector& betas) {
    return discounted_regret(realized, losses, {betas, Monotonicity::kNone}).value;
  });
  m.def("comparator_stats", [](const ComparatorSequence& u) {
    const auto s = comparator_stats(u);
    py::dict out;
    out["u1"] = s.u1_norm;
    out["m"] = s.m;
    out["n"] = s.n;
    out["U_sum"] = s.u_sum;
    return out;
  });

  m.def("bound_fixed_share",
        [](std::size_t d, double eta, double alpha, double mm, double u_sum, double u1) {
          return bound_fixed_share({.d = d, .eta = eta, .alpha = alpha}, mm, u_sum, u1);
        },
        py::arg("d"), py::arg("eta"), py::arg("alpha"), py::arg("m"), py::arg("U"), py::arg("u1"));
  m.def("bound_projected",
        [](std::size_t d, double eta, double alpha, double mm, double u_sum, double u1) {
          return bound_projected({.d = d, .eta = eta, .alpha = alpha}, mm, u_sum, u1);
        },
        py::arg("d"), py::arg("eta"), py::arg("alpha"), py::arg("m"), py::arg("U"), py::arg("u1"));
  m.def("tune_fixed_share", [](std::size_t d, double m0, double u0) {
    const auto t = tune_fixed_share(d, m0, u0);
    return py::make_tuple(t.eta, t.alpha, t.bound);
  }, py::arg("d"), py::arg("m0"), py::arg("U0"));
  m.def("tune_small_loss", [](std::size_t d, double m0, double u0, double l0) {
    const auto t = tune_small_loss(d, m0, u0, l0);
    return py::make_tuple(t.eta, t.alpha, t.bound);
  }, py::arg("d"), py::arg("m0"), py::arg("U0"), py::arg("L0"));
  m.def("bound_adaptive", [](std::size_t d, std::size_t tau0) {
    const auto b = bound_adaptive(d, tau0);
    return py::make_tuple(b.exact, b.relaxed);
  }, py::arg("d"), py::arg("tau0"));
  m.def("corollary7_bound", &corollary7_bound, py::arg("d"), py::arg("T"));

  m.def("run_experiment",
        [](const std::string& config_json, unsigned threads) {
          const auto spec = parse_experiment(nlohmann::json::parse(config_json));
          std::vector<RegretReport> rows;
          {
            py::gil_scoped_release release;
            rows = run_experiment(spec, threads);
          }
          py::list out;
          for (const auto& r : rows) out.append(report_dict(r));
          out.append(report_dict(worst_case_summary(rows)));
          return out;
        },
        py::arg("config_json"), py::arg("threads") = 1,
        "Runs a JSON config; returns one dict per repetition plus the summary row.");
  m.def("report_csv",
        [](const std::string& config_json, unsigned threads) {
          const auto spec = parse_experiment(nlohmann::json::parse(config_json));
          std::ostringstream out;
          write_report_csv(out, run_experiment(spec, threads), false);
          return out.str();
        },
        py::arg("config_json"), py::arg("threads") = 1);
}
