#include "dsm/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace dsm {

double StopRule::threshold(double delta) const {
  return C * std::pow(delta, zeta);
}

void StopRule::validate(double delta) const {
  if (!(C > 0.0) || !(zeta > 0.0 && zeta <= 1.0))
    throw std::invalid_argument("StopRule: need C > 0 and zeta in (0,1]");
  if (!(delta > 0.0)) throw std::invalid_argument("StopRule: delta <= 0");
  if (!(threshold(delta) > delta))
    throw std::invalid_argument("StopRule: C delta^zeta > delta violated");
}

namespace {

// Zonneveld 4(3) embedded pair.
constexpr double kC[5] = {0.0, 0.5, 0.5, 1.0, 0.75};
constexpr double kA21 = 0.5;
constexpr double kA32 = 0.5;
constexpr double kA43 = 1.0;
constexpr double kA51 = 5.0 / 32.0, kA52 = 7.0 / 32.0, kA53 = 13.0 / 32.0,
                 kA54 = -1.0 / 32.0;
constexpr double kB[5] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 0.0};
// b - bhat, bhat the 3rd-order weights
constexpr double kE[5] = {2.0 / 3.0, -2.0, -2.0, -2.0, 16.0 / 3.0};

struct Flow {
  const MonotoneOperator& F;
  const Schedule& schedule;
  const HVector& f_delta;
  const std::vector<double>& ubar;
  const std::vector<double>& w;
  mutable std::vector<double> fbuf;

  // deriv = -(F(u) + a(t)(u - ubar) - f_delta); returns the F(u) values in
  // fbuf so callers can form the discrepancy without another apply.
  void operator()(double t, const std::vector<double>& u,
                  std::vector<double>& deriv) const {
    F.apply_into(u, fbuf);
    const double a = schedule.value(t);
    for (std::size_t i = 0; i < u.size(); ++i)
      deriv[i] = -(fbuf[i] + a * (u[i] - ubar[i]) - f_delta[i]);
  }

  double discrepancy_from_fbuf() const {
    double s = 0.0;
    for (std::size_t i = 0; i < fbuf.size(); ++i) {
      const double d = fbuf[i] - f_delta[i];
      s += w[i] * d * d;
    }
    return std::sqrt(s);
  }
};

void hermite_eval(const std::vector<double>& u0, const std::vector<double>& d0,
                  const std::vector<double>& u1, const std::vector<double>& d1,
                  double h, double theta, std::vector<double>& out) {
  const double t2 = theta * theta, t3 = t2 * theta;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + theta;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  for (std::size_t i = 0; i < u0.size(); ++i)
    out[i] = h00 * u0[i] + h10 * h * d0[i] + h01 * u1[i] + h11 * h * d1[i];
}

}  // namespace

TrajectoryRecord integrate_shifted(const MonotoneOperator& F,
                                   const Schedule& schedule,
                                   const NoisyData& data, const HVector& u0,
                                   const HVector& ubar, const StopRule& rule,
                                   const IntegratorOptions& opts) {
  rule.validate(data.delta);
  {
    auto cert = certify(schedule, ConditionId::eq28, std::nullopt, 200);
    if (!cert.passed)
      throw std::invalid_argument("integrate: schedule fails decay conditions");
  }
  require_compatible(u0, data.f_delta);
  require_compatible(u0, ubar);

  const std::size_t n = u0.size();
  const auto& w = u0.weights();
  const double thr = rule.threshold(data.delta);

  Flow flow{F, schedule, data.f_delta, ubar.coords(), w,
            std::vector<double>(n)};

  std::vector<double> u = u0.coords(), du(n);
  double t = 0.0;
  flow(t, u, du);
  double disc = flow.discrepancy_from_fbuf();
  double hval = norm_raw(du, w);  // h = ||v||, v = -du/dt

  if (!(disc > thr))
    throw InitError(
        "integrate: ||F(u0) - f_delta|| <= C delta^zeta; u0 already within "
        "the stopping region");

  TrajectoryRecord rec;
  rec.threshold = thr;
  auto push_sample = [&](double tt, const std::vector<double>& uu, double dd,
                         double hh) {
    if (rec.samples.size() >= opts.max_samples) return;
    rec.samples.push_back(TrajectorySample{
        tt, u0.with_coords(uu), dd, schedule.value(tt), hh});
  };
  push_sample(0.0, u, disc, hval);
  double next_record = 1e-4;

  // step size init
  double hstep = opts.h0;
  if (hstep <= 0.0) hstep = 1e-3 / (1.0 + norm_raw(du, w));

  std::vector<double> k2(n), k3(n), k4(n), k5(n), utmp(n), unew(n), dunew(n),
      err(n), umid(n), dmid(n);
  double errprev = 1.0;
  const double safety = 0.9;

  while (t < opts.t_max) {
    if (t + hstep > opts.t_max) hstep = opts.t_max - t;
    if (hstep < 1e-14 * (1.0 + t))
      throw StiffnessError("integrate: step size underflow at t=" +
                           std::to_string(t));

    // stages (k1 = du)
    for (std::size_t i = 0; i < n; ++i) utmp[i] = u[i] + hstep * kA21 * du[i];
    flow(t + kC[1] * hstep, utmp, k2);
    for (std::size_t i = 0; i < n; ++i) utmp[i] = u[i] + hstep * kA32 * k2[i];
    flow(t + kC[2] * hstep, utmp, k3);
    for (std::size_t i = 0; i < n; ++i) utmp[i] = u[i] + hstep * kA43 * k3[i];
    flow(t + kC[3] * hstep, utmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      utmp[i] = u[i] + hstep * (kA51 * du[i] + kA52 * k2[i] + kA53 * k3[i] +
                                kA54 * k4[i]);
    flow(t + kC[4] * hstep, utmp, k5);

    double errnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      unew[i] = u[i] + hstep * (kB[0] * du[i] + kB[1] * k2[i] + kB[2] * k3[i] +
                                kB[3] * k4[i]);
      const double e = hstep * (kE[0] * du[i] + kE[1] * k2[i] + kE[2] * k3[i] +
                                kE[3] * k4[i] + kE[4] * k5[i]);
      const double sc =
          opts.atol + opts.rtol * std::max(std::abs(u[i]), std::abs(unew[i]));
      errnorm += (e / sc) * (e / sc);
    }
    errnorm = std::sqrt(errnorm / double(n));

    if (errnorm > 1.0) {
      const double fac = std::max(
          0.1, std::min(0.9, safety * std::pow(errnorm, -0.25)));
      hstep *= fac;
      continue;
    }

    // accepted
    const double tnew = t + hstep;
    flow(tnew, unew, dunew);
    const double discnew = flow.discrepancy_from_fbuf();
    const double hnew = norm_raw(dunew, w);
    rec.accepted_steps++;

    if (discnew <= thr) {
      // first crossing inside (t, tnew]; refine on the dense output
      double lo = 0.0, hi = 1.0;
      double tstar = tnew;
      umid = unew;
      double dstar = discnew;
      std::vector<double> fmid(n);
      for (int it = 0; it < 200; ++it) {
        if (std::abs(dstar - thr) <= rule.crossing_rel_tol * thr) break;
        const double mid = 0.5 * (lo + hi);
        hermite_eval(u, du, unew, dunew, hstep, mid, umid);
        F.apply_into(umid, fmid);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = fmid[i] - data.f_delta[i];
          s += w[i] * d * d;
        }
        dstar = std::sqrt(s);
        tstar = t + mid * hstep;
        if (dstar > thr)
          lo = mid;
        else
          hi = mid;
      }
      if (std::abs(dstar - thr) > rule.crossing_rel_tol * thr) {
        // ended on the wrong side of the bracket; evaluate at hi
        hermite_eval(u, du, unew, dunew, hstep, hi, umid);
        F.apply_into(umid, fmid);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = fmid[i] - data.f_delta[i];
          s += w[i] * d * d;
        }
        dstar = std::sqrt(s);
        tstar = t + hi * hstep;
      }
      rec.stopped = true;
      rec.t_delta = tstar;
      rec.u_at_stop = u0.with_coords(umid);
      rec.final_discrepancy = dstar;
      // the stop sample itself
      std::vector<double> vmid(n);
      const double amid = schedule.value(tstar);
      for (std::size_t i = 0; i < n; ++i)
        vmid[i] = fmid[i] + amid * (umid[i] - ubar[i]) - data.f_delta[i];
      push_sample(tstar, umid, dstar, norm_raw(vmid, w));
      return rec;
    }

    u.swap(unew);
    du.swap(dunew);
    t = tnew;
    disc = discnew;
    hval = hnew;

    if (t >= next_record) {
      push_sample(t, u, disc, hval);
      next_record = std::max(t * opts.record_factor,
                             next_record * opts.record_factor);
    }

    const double fac =
        std::max(0.2, std::min(5.0, safety * std::pow(errnorm, -0.7 / 4.0) *
                                        std::pow(errprev, 0.4 / 4.0)));
    hstep *= fac;
    errprev = std::max(errnorm, 1e-10);
  }

  rec.final_discrepancy = disc;
  throw TimeoutError("integrate: t_max reached without crossing; final "
                     "discrepancy " + std::to_string(disc),
                     disc);
}

TrajectoryRecord integrate(const MonotoneOperator& F, const Schedule& schedule,
                           const NoisyData& data, const HVector& u0,
                           const StopRule& rule,
                           const IntegratorOptions& opts) {
  return integrate_shifted(F, schedule, data, u0, u0.zeros_like(), rule, opts);
}

InitCertificate check_init(const MonotoneOperator& F, const Schedule& schedule,
                           const NoisyData& data, const HVector& u0,
                           const std::optional<HVector>& ubar,
                           const StopRule& rule, double p, double q,
                           double theta) {
  {
    auto cert = certify(schedule, ConditionId::eq46_q, q, 500);
    if (!cert.passed)
      throw std::invalid_argument(
          "check_init: schedule fails the q-bounded (1/3) conditions");
  }
  if (!(theta >= 0.0)) throw std::invalid_argument("check_init: theta < 0");

  InitCertificate out;
  out.p = p;
  out.theta = theta;
  out.p_ceiling = 1.0 - q / (1.0 - 2.0 * q);

  const double a0 = schedule.value(0.0);
  const double thr = rule.threshold(data.delta);

  const HVector Fu0 = F.apply(u0);
  out.premise.lhs = norm(Fu0 - data.f_delta);
  out.premise.rhs = thr;
  out.premise.holds = out.premise.lhs > thr && thr > data.delta;

  // h(0) = ||F(u0) + a(0)(u0 - ubar) - f_delta||
  HVector shift = ubar ? (u0 - *ubar) : u0;
  const double h0 = norm(axpy(a0, shift, Fu0) - data.f_delta);

  const double tol = default_path_tol(a0, data.delta);
  const PathPoint v0 = solve_regularized(F, a0, data.f_delta, tol);

  out.small_h0_p.lhs = h0;
  out.small_h0_p.rhs = p * a0 * v0.psi;
  out.small_h0_p.holds =
      p > 0.0 && p < out.p_ceiling && h0 <= out.small_h0_p.rhs;

  out.small_h0_th.lhs = h0;
  out.small_h0_th.rhs = theta * std::pow(data.delta, rule.zeta);
  out.small_h0_th.holds = theta < rule.C && h0 <= out.small_h0_th.rhs;
  return out;
}

}  // namespace dsm
