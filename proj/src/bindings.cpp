#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dsm/integrator.hpp"
#include "dsm/path.hpp"
#include "dsm/problems.hpp"
#include "dsm/schedule.hpp"
#include "dsm/study.hpp"
#include "dsm/verify.hpp"

namespace py = pybind11;
using namespace dsm;

namespace {

HVector to_hvector(const std::vector<double>& coords) {
  return HVector(coords, uniform_weights(coords.size()));
}

py::dict point_dict(const PathPoint& p) {
  py::dict d;
  d["t"] = p.t;
  d["a"] = p.a;
  d["V"] = p.V.coords();
  d["psi"] = p.psi;
  d["phi_d"] = p.phi_d;
  d["residual"] = p.residual;
  return d;
}

py::dict record_dict(const TrajectoryRecord& rec) {
  py::dict d;
  d["stopped"] = rec.stopped;
  d["t_delta"] = rec.t_delta ? py::object(py::float_(*rec.t_delta))
                             : py::object(py::none());
  d["u_at_stop"] = rec.u_at_stop ? py::object(py::cast(rec.u_at_stop->coords()))
                                 : py::object(py::none());
  d["threshold"] = rec.threshold;
  d["accepted_steps"] = rec.accepted_steps;
  d["final_discrepancy"] = rec.final_discrepancy;
  py::list samples;
  for (const auto& s : rec.samples) {
    py::dict sd;
    sd["t"] = s.t;
    sd["u"] = s.u.coords();
    sd["discrepancy"] = s.discrepancy;
    sd["a"] = s.a;
    sd["h"] = s.h;
    samples.append(sd);
  }
  d["samples"] = samples;
  return d;
}

}  // namespace

PYBIND11_MODULE(_dsmflow, m) {
  m.doc() = "regularized-flow solver for monotone operator equations";

  m.def("registry_labels", &registry_labels);

  m.def("schedule_value",
        [](double d, double c, double b, double t) {
          return Schedule::power(d, c, b).value(t);
        },
        py::arg("d"), py::arg("c"), py::arg("b"), py::arg("t"));

  m.def("validate_schedule",
        [](double d, double c, double b, double q) {
          const auto s = Schedule::power(d, c, b);
          py::dict out;
          out["decay"] = certify(s, ConditionId::eq28).passed;
          out["q_half"] = certify(s, ConditionId::eq26_q, q).passed;
          out["q_third"] = certify(s, ConditionId::eq46_q, q).passed;
          out["admissible"] = d > b / q * std::pow(c, b - 1.0);
          return out;
        },
        py::arg("d") = 3.0, py::arg("c") = 1.0, py::arg("b") = 0.5,
        py::arg("q") = 0.25);

  m.def("sample_path",
        [](const std::string& problem, double delta, unsigned seed,
           const std::vector<double>& times, double d, double c, double b) {
          const auto prob = registry(problem);
          const auto s = Schedule::power(d, c, b,
                                         std::max(1e6, times.back() * 2.0));
          const auto data = perturb(prob.f, delta, seed);
          const auto pts =
              sample_path(prob.op, s, data.f_delta, times, delta);
          py::list out;
          for (const auto& p : pts) out.append(point_dict(p));
          return out;
        },
        py::arg("problem"), py::arg("delta"), py::arg("seed"),
        py::arg("times"), py::arg("d") = 3.0, py::arg("c") = 1.0,
        py::arg("b") = 0.5);

  m.def("solve",
        [](const std::string& problem, double delta, unsigned seed, double d,
           double c, double b, double C, double zeta, double rtol,
           double atol, double t_max,
           const std::optional<std::vector<double>>& ubar) {
          const auto prob = registry(problem);
          const auto s = Schedule::power(d, c, b, t_max);
          const auto data = perturb(prob.f, delta, seed);
          const StopRule rule{C, zeta};
          IntegratorOptions opts;
          opts.rtol = rtol;
          opts.atol = atol;
          opts.t_max = t_max;
          const HVector u0 = prob.y.zeros_like();
          TrajectoryRecord rec;
          HVector target = prob.y;
          if (ubar) {
            const HVector ub = prob.y.with_coords(*ubar);
            rec = integrate_shifted(prob.op, s, data, u0, ub, rule, opts);
            target = prob.minimal_distance_solution(ub);
          } else {
            rec = integrate(prob.op, s, data, u0, rule, opts);
          }
          auto out = record_dict(rec);
          out["error"] = norm(*rec.u_at_stop - target);
          out["target"] = target.coords();
          return out;
        },
        py::arg("problem"), py::arg("delta"), py::arg("seed") = 101,
        py::arg("d") = 3.0, py::arg("c") = 1.0, py::arg("b") = 0.5,
        py::arg("C") = 1.5, py::arg("zeta") = 0.9, py::arg("rtol") = 1e-8,
        py::arg("atol") = 1e-12, py::arg("t_max") = 1e6,
        py::arg("ubar") = std::nullopt);

  m.def("run_study_config",
        [](const std::string& text) {
          const auto cfg = parse_config(text);
          const auto res = run_study(cfg);
          py::list rows;
          for (const auto& r : res.rows) {
            py::dict rd;
            rd["delta"] = r.delta;
            rd["seed"] = r.seed;
            rd["t_delta"] = r.t_delta;
            rd["error"] = r.error;
            rd["discrepancy_at_stop"] = r.discrepancy_at_stop;
            rd["a_at_stop"] = r.a_at_stop;
            rd["status"] = r.status;
            rd["wall_time_ms"] = r.wall_time_ms;
            rows.append(rd);
          }
          return rows;
        },
        py::arg("text"));

  m.def("gronwall_bound",
        [](const std::vector<double>& t, const std::vector<double>& g,
           const std::vector<double>& alpha, const std::vector<double>& beta) {
          GronwallInstance inst{t, g, alpha, beta};
          return gronwall_bound(inst);
        },
        py::arg("t"), py::arg("g"), py::arg("alpha"), py::arg("beta"));
}
