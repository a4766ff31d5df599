// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Python surface: region geometry, the indicator rounding and homotopy
// schedule helpers, and a one-call scenario solver returning a plain dict.
// Heavy lifting stays in the C++ core; results round-trip through the same
// persisted records the command line tool writes.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "trigopt/bench.hpp"
#include "trigopt/logic.hpp"
#include "trigopt/mpvc.hpp"
#include "trigopt/scenarios.hpp"

namespace py = pybind11;
using namespace trigopt;

namespace {

py::dict record_dict(const ResultsRecord& r) {
  py::dict d;
  d["scenario"] = r.scenario;
  d["formulation"] = r.formulation;
  d["solver"] = r.solver;
  d["status"] = r.status;
  d["objective"] = r.objective;
  d["effort"] = r.effort;
  d["indicator"] = r.indicator;
  d["rate_penalty"] = r.rate_penalty;
  d["slack_penalty"] = r.slack_penalty;
  d["final_state"] = r.final_state;
  d["final_mass"] = r.final_mass;
  d["sum_delta"] = r.sum_delta;
  d["sum_delta_per_region"] = r.sum_delta_per_region;
  d["region_names"] = r.region_names;
  d["runtime_sec"] = r.runtime_sec;
  d["solver_steps"] = r.solver_steps;
  d["solution"] = r.solution;
  d["config_hash"] = r.config_hash;
  d["record_path"] = r.record_path;
  d["exit_code"] = exit_code(r);
  return d;
}

}  // namespace

PYBIND11_MODULE(_trigopt, m) {
  m.doc() = "Trajectory optimization with logic-triggered constraints";
  m.attr("__version__") = kToolVersion;

  py::class_<Polytope>(m, "Polytope", "Region {x : A x + b <= 0}")
      .def(py::init([](const std::string& name, const Eigen::MatrixXd& A,
                       const Eigen::VectorXd& b) {
             Polytope p;
             p.name = name;
             p.dim = static_cast<int>(A.cols());
             p.A = A;
             p.b = b;
             p.validate();
             return p;
           }),
           py::arg("name"), py::arg("A"), py::arg("b"))
      .def_readwrite("name", &Polytope::name)
      .def_readonly("dim", &Polytope::dim)
      .def_readwrite("A", &Polytope::A)
      .def_readwrite("b", &Polytope::b)
      .def("contains", &Polytope::contains, py::arg("point"), py::arg("tol") = 0.0)
      .def("validate", &Polytope::validate)
      .def("__repr__", [](const Polytope& p) {
        return "Polytope('" + p.name + "', " + std::to_string(p.A.rows()) + " faces in R^" +
               std::to_string(p.dim) + ")";
      });

  m.def("pyramid_regions", &pyramid_regions, py::arg("beta_rad"), py::arg("centers"),
        py::arg("d"),
        "Downward-opening pyramids with half-angle beta at the given centers");
  m.def("load_polytopes", &load_polytopes, py::arg("path"));
  m.def("save_polytopes", &save_polytopes, py::arg("path"), py::arg("regions"));
  m.def("parse_polytopes", &parse_polytopes, py::arg("json_text"));
  m.def("serialize_polytopes", &serialize_polytopes, py::arg("regions"));

  m.def("round_relaxed", &round_relaxed, py::arg("delta_hat"), py::arg("tol") = 1e-5,
        "Round relaxed indicators: 1 iff within tol of 1, else 0");

  m.def(
      "sigmoid_reward",
      [](double h, double weight, double beta) { return -weight / (1.0 + std::exp(-beta * h)); },
      py::arg("h"), py::arg("weight"), py::arg("beta") = 10.0,
      "Smooth activation reward surrogate -w / (1 + exp(-beta h))");

  m.def(
      "simulated_schedule",
      [](double tau0, double eps0, double tau_min, double kappa0, double kappa1,
         int max_steps) {
        HomotopyParams hp;
        hp.tau0 = tau0;
        hp.eps0 = eps0;
        hp.tau_min = tau_min;
        hp.kappa0 = kappa0;
        hp.kappa1 = kappa1;
        return simulated_schedule(hp, max_steps);
      },
      py::arg("tau0") = 1e2, py::arg("eps0") = 0.6, py::arg("tau_min") = 1e-3,
      py::arg("kappa0") = 1.6, py::arg("kappa1") = 1.2, py::arg("max_steps") = 64,
      "Attempted-tau sequence of the homotopy assuming every solve succeeds");

  m.def(
      "solve_scenario",
      [](const std::string& scenario, const std::string& formulation, const std::string& solver,
         const std::string& params, const std::string& regions, const std::string& out_dir,
         const std::map<std::string, double>& overrides, unsigned seed, bool trace) {
        RunConfig cfg;
        cfg.scenario = scenario;
        cfg.formulation = formulation;
        cfg.solver = solver;
        cfg.params_path = params;
        cfg.regions_path = regions;
        cfg.out_dir = out_dir;
        cfg.overrides = overrides;
        cfg.seed = seed;
        cfg.trace = trace;
        return record_dict(run(cfg));
      },
      py::arg("scenario"), py::arg("formulation"), py::arg("solver"), py::arg("params") = "",
      py::arg("regions") = "", py::arg("out_dir") = "runs",
      py::arg("overrides") = std::map<std::string, double>{}, py::arg("seed") = 0,
      py::arg("trace") = false,
      "Build, solve, and persist one scenario configuration; returns the record as a dict");

  m.def(
      "load_record", [](const std::string& path) { return record_dict(load_record(path)); },
      py::arg("path"), "Reload a persisted results record (with schema validation)");

  m.def(
      "export_plot_data",
      [](const std::string& record_path, const std::string& out_dir) {
        ResultsRecord rec = load_record(record_path);
        if (rec.solution.empty())
          throw std::invalid_argument(record_path + " holds no solution to plot");
        ScenarioProblem sp = rebuild_scenario(rec);
        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
            rec.solution.data(), static_cast<Eigen::Index>(rec.solution.size()));
        const std::filesystem::path in(record_path);
        const std::string dir =
            out_dir.empty() ? (in.has_parent_path() ? in.parent_path().string() : ".") : out_dir;
        const std::string stem = in.stem().string();
        emit_plot_data(sp, x, dir, stem);
        return py::make_tuple((std::filesystem::path(dir) / (stem + "_states.csv")).string(),
                              (std::filesystem::path(dir) / (stem + "_controls.csv")).string());
      },
      py::arg("record_path"), py::arg("out_dir") = "",
      "Write the per-node CSV series for a solved record; returns the two paths");
}
