// Command line driver: schedule certification, regularized-path sampling,
// single flow runs, trajectory audits, and batch delta-sweep studies.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dsm/integrator.hpp"
#include "dsm/path.hpp"
#include "dsm/problems.hpp"
#include "dsm/schedule.hpp"
#include "dsm/study.hpp"
#include "dsm/verify.hpp"

namespace {

using dsm::format_double;

std::vector<double> log_times(double t0, double t1, int count) {
  std::vector<double> out{0.0};
  for (int i = 0; i < count - 1; ++i)
    out.push_back(t0 * std::pow(t1 / t0, double(i) / (count - 2)));
  return out;
}

dsm::HVector vec_like(const dsm::HVector& proto,
                      const std::vector<double>& v) {
  if (v.size() != proto.size())
    throw std::invalid_argument("vector length does not match the problem");
  return proto.with_coords(v);
}

int cmd_validate_schedule(double d, double c, double b, double q,
                          double t_max) {
  const auto s = dsm::Schedule::power(d, c, b, t_max);
  struct Row {
    const char* name;
    dsm::ConditionId id;
    std::optional<double> q;
  } rows[] = {
      {"eq28", dsm::ConditionId::eq28, std::nullopt},
      {"eq26", dsm::ConditionId::eq26_q, q},
      {"eq46", dsm::ConditionId::eq46_q, q},
  };
  std::cout << "condition,q,passed,witness,detail\n";
  int bad = 0;
  for (const auto& r : rows) {
    dsm::ConditionCertificate cert;
    try {
      cert = dsm::certify(s, r.id, r.q);
    } catch (const std::exception& e) {
      std::cout << r.name << "," << (r.q ? format_double(*r.q) : "") << ",error,,"
                << e.what() << "\n";
      ++bad;
      continue;
    }
    std::cout << r.name << "," << (r.q ? format_double(*r.q) : "") << ","
              << (cert.passed ? "yes" : "no") << ","
              << (cert.witness ? format_double(*cert.witness) : "") << ","
              << cert.detail << "\n";
    if (!cert.passed) ++bad;
  }
  const double admissible = b / q * std::pow(c, b - 1.0);
  std::cout << "admissibility,d>" << format_double(admissible) << ","
            << (d > admissible ? "yes" : "no") << ",,closed form\n";
  return bad == 0 && d > admissible ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solver for ill-posed monotone operator equations via a "
               "regularized gradient-free flow with a discrepancy-principle "
               "stopping rule"};
  app.require_subcommand(1);

  // ---- validate-schedule
  double d = 3.0, c = 1.0, b = 0.5, q = 0.25, t_max = 1e6;
  auto* vs = app.add_subcommand("validate-schedule",
                                "certify schedule conditions");
  vs->add_option("--d", d);
  vs->add_option("--c", c);
  vs->add_option("--b", b);
  vs->add_option("--q", q);
  vs->add_option("--t-max", t_max);

  // ---- path
  std::string problem = "identity", out_file;
  double delta = 1e-2;
  unsigned seed = 101;
  double t1 = 1e4;
  int count = 50;
  auto* pa = app.add_subcommand("path", "sample the regularized path");
  pa->add_option("--problem", problem);
  pa->add_option("--delta", delta);
  pa->add_option("--seed", seed);
  pa->add_option("--d", d);
  pa->add_option("--c", c);
  pa->add_option("--b", b);
  pa->add_option("--t1", t1);
  pa->add_option("--n", count);
  pa->add_option("--out", out_file);

  // ---- solve
  double C = 1.5, zeta = 0.9, rtol = 1e-8, atol = 1e-12;
  std::vector<double> ubar_v, u0_v;
  std::string traj_file;
  auto* so = app.add_subcommand("solve", "run the flow to the stopping time");
  so->add_option("--problem", problem);
  so->add_option("--delta", delta);
  so->add_option("--seed", seed);
  so->add_option("--d", d);
  so->add_option("--c", c);
  so->add_option("--b", b);
  so->add_option("--C", C);
  so->add_option("--zeta", zeta);
  so->add_option("--rtol", rtol);
  so->add_option("--atol", atol);
  so->add_option("--t-max", t_max);
  so->add_option("--ubar", ubar_v)->delimiter(',');
  so->add_option("--u0", u0_v)->delimiter(',');
  so->add_option("--csv", traj_file);

  // ---- audit
  std::string replay_file;
  auto* au = app.add_subcommand(
      "audit", "replay a trajectory CSV and check the analytic envelopes");
  au->add_option("--problem", problem);
  au->add_option("--delta", delta);
  au->add_option("--seed", seed);
  au->add_option("--d", d);
  au->add_option("--c", c);
  au->add_option("--b", b);
  au->add_option("--q", q);
  au->add_option("--t-max", t_max);
  au->add_option("--u0", u0_v)->delimiter(',');
  au->add_option("--traj", replay_file)->required();

  // ---- study
  std::string config_file, study_out;
  auto* st = app.add_subcommand("study", "seeded delta-sweep study");
  st->add_option("--config", config_file)->required();
  st->add_option("--out", study_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*vs) return cmd_validate_schedule(d, c, b, q, t_max);

    if (*pa) {
      const auto prob = dsm::registry(problem);
      const auto sched = dsm::Schedule::power(d, c, b, std::max(t_max, t1));
      const auto data = dsm::perturb(prob.f, delta, seed);
      const auto pts = dsm::sample_path(prob.op, sched, data.f_delta,
                                        log_times(1e-2, t1, count), delta);
      std::ostringstream os;
      os << "t,a,psi,phi_d,residual\n";
      for (const auto& p : pts)
        os << format_double(p.t) << ',' << format_double(p.a) << ','
           << format_double(p.psi) << ',' << format_double(p.phi_d) << ','
           << format_double(p.residual) << '\n';
      if (out_file.empty())
        std::cout << os.str();
      else
        std::ofstream(out_file) << os.str();
      return 0;
    }

    if (*so) {
      const auto prob = dsm::registry(problem);
      const auto sched = dsm::Schedule::power(d, c, b, t_max);
      const auto data = dsm::perturb(prob.f, delta, seed);
      const dsm::StopRule rule{C, zeta};
      dsm::IntegratorOptions opts;
      opts.rtol = rtol;
      opts.atol = atol;
      opts.t_max = t_max;
      const dsm::HVector u0 =
          u0_v.empty() ? prob.y.zeros_like() : vec_like(prob.y, u0_v);
      dsm::TrajectoryRecord rec;
      dsm::HVector target = prob.y;
      if (!ubar_v.empty()) {
        const auto ub = vec_like(prob.y, ubar_v);
        rec = dsm::integrate_shifted(prob.op, sched, data, u0, ub, rule, opts);
        target = prob.minimal_distance_solution(ub);
      } else {
        rec = dsm::integrate(prob.op, sched, data, u0, rule, opts);
      }
      std::cout << "problem=" << problem << " delta=" << format_double(delta)
                << " seed=" << seed
                << " t_delta=" << format_double(*rec.t_delta)
                << " discrepancy=" << format_double(rec.final_discrepancy)
                << " error=" << format_double(dsm::norm(*rec.u_at_stop - target))
                << " a=" << format_double(sched.value(*rec.t_delta))
                << " steps=" << rec.accepted_steps << "\n";
      if (!traj_file.empty()) {
        std::ofstream os(traj_file);
        os << "t,discrepancy,a,h,u_norm\n";
        for (const auto& s : rec.samples)
          os << format_double(s.t) << ',' << format_double(s.discrepancy)
             << ',' << format_double(s.a) << ',' << format_double(s.h) << ','
             << format_double(dsm::norm(s.u)) << '\n';
      }
      return 0;
    }

    if (*au) {
      const auto prob = dsm::registry(problem);
      const auto sched = dsm::Schedule::power(d, c, b, t_max);
      const auto data = dsm::perturb(prob.f, delta, seed);
      std::ifstream is(replay_file);
      if (!is) throw std::runtime_error("cannot open " + replay_file);
      std::string line;
      std::getline(is, line);  // header
      std::vector<double> ts, hs;
      while (std::getline(is, line)) {
        std::stringstream ls(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(std::stod(cell));
        if (cells.size() < 4) continue;
        ts.push_back(cells[0]);
        hs.push_back(cells[3]);
      }
      if (ts.size() < 2) throw std::runtime_error("trajectory too short");

      // regularized path at the stored times
      std::vector<double> times = ts;
      if (times.front() != 0.0) times.insert(times.begin(), 0.0);
      const auto path =
          dsm::sample_path(prob.op, sched, data.f_delta, times, delta);

      // h(t) envelope with decay (1-q) a and source |a'| psi
      dsm::GronwallInstance inst;
      for (std::size_t i = 0; i < path.size(); ++i) {
        const double t = path[i].t;
        inst.t.push_back(t);
        inst.alpha.push_back((1.0 - q) * sched.value(t));
        inst.beta.push_back(std::abs(sched.derivative(t)) * path[i].psi);
      }
      const dsm::HVector u0 =
          u0_v.empty() ? prob.y.zeros_like() : vec_like(prob.y, u0_v);
      const double h0 =
          dsm::norm(dsm::axpy(sched.value(0.0), u0, prob.op.apply(u0)) -
                    data.f_delta);
      inst.g.assign(path.size(), 0.0);
      inst.g[0] = h0;
      for (std::size_t i = 0; i < ts.size(); ++i)
        inst.g[i + (times.size() - ts.size())] = hs[i];
      const auto hrep = dsm::gronwall_check(inst, 0.05);
      std::cout << "check,passed,worst_margin,witness\n";
      std::cout << "h_envelope," << (hrep.passed ? "yes" : "no") << ','
                << format_double(hrep.worst_margin) << ','
                << (hrep.witness_t ? format_double(*hrep.witness_t) : "")
                << '\n';
      const auto aux = dsm::audit_aux33(sched, q, path);
      std::cout << "aux33," << (aux.passed ? "yes" : "no") << ','
                << format_double(aux.worst_margin) << ','
                << (aux.witness_t ? format_double(*aux.witness_t) : "")
                << '\n';
      const double tc = std::min(ts.back(), sched.t_max());
      const auto lim = dsm::audit_limits(
          sched, path, {tc / 1000.0, tc / 100.0, tc / 10.0, tc});
      std::cout << "limits," << (lim.tail_ok ? "yes" : "no") << ",,\n";
      return hrep.passed && aux.passed && lim.tail_ok ? 0 : 1;
    }

    if (*st) {
      std::ifstream is(config_file);
      if (!is) throw std::runtime_error("cannot open " + config_file);
      std::stringstream buf;
      buf << is.rdbuf();
      auto cfg = dsm::parse_config(buf.str());
      if (!study_out.empty()) cfg.output = study_out;
      const auto res = dsm::run_study(cfg);
      if (cfg.output.empty()) {
        dsm::write_csv(res.rows, std::cout);
      } else {
        std::ofstream os(cfg.output);
        dsm::write_csv(res.rows, os);
        std::cout << "wrote " << res.rows.size() << " rows to " << cfg.output
                  << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
