#include "dsm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dsm/detail/expquad.hpp"

namespace dsm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Linear interpolation of samples (tt, yy) at s, clamped at the ends.
double lerp_at(const std::vector<double>& tt, const std::vector<double>& yy,
               double s) {
  if (s <= tt.front()) return yy.front();
  if (s >= tt.back()) return yy.back();
  auto it = std::upper_bound(tt.begin(), tt.end(), s);
  const std::size_t i = std::size_t(it - tt.begin()) - 1;
  const double x = (s - tt[i]) / (tt[i + 1] - tt[i]);
  return yy[i] + x * (yy[i + 1] - yy[i]);
}

// Fine grid for schedule-weighted quadrature: path times plus `sub`
// subdivisions of every gap.
std::vector<double> refine_grid(const std::vector<double>& t, int sub) {
  std::vector<double> out;
  out.reserve(t.size() * std::size_t(sub));
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    for (int j = 0; j < sub; ++j)
      out.push_back(t[i] + (t[i + 1] - t[i]) * double(j) / sub);
  out.push_back(t.back());
  return out;
}

}  // namespace

void GronwallInstance::validate() const {
  const std::size_t n = t.size();
  if (n < 2 || g.size() != n || alpha.size() != n || beta.size() != n)
    throw std::invalid_argument("GronwallInstance: length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (g[i] < 0.0 || alpha[i] < 0.0 || beta[i] < 0.0)
      throw std::invalid_argument("GronwallInstance: negative samples");
    if (i + 1 < n && !(t[i + 1] > t[i]))
      throw std::invalid_argument("GronwallInstance: grid not increasing");
  }
}

std::vector<double> log_weighted_cumulative(const std::vector<double>& t,
                                            const std::vector<double>& phi,
                                            const std::vector<double>& g) {
  std::vector<double> out(t.size(), kNegInf);
  double acc = kNegInf;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double seg = detail::log_exp_weighted_segment(
        phi[i], phi[i + 1], g[i], g[i + 1], t[i + 1] - t[i]);
    acc = detail::logaddexp(acc, seg);
    out[i + 1] = acc;
  }
  return out;
}

std::vector<double> gronwall_bound(const GronwallInstance& inst) {
  inst.validate();
  const std::size_t n = inst.t.size();
  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    phi[i + 1] = phi[i] + 0.5 * (inst.alpha[i] + inst.alpha[i + 1]) *
                              (inst.t[i + 1] - inst.t[i]);
  const auto logI = log_weighted_cumulative(inst.t, phi, inst.beta);
  std::vector<double> bound(n);
  for (std::size_t i = 0; i < n; ++i)
    bound[i] = inst.g[0] * std::exp(-phi[i]) + std::exp(logI[i] - phi[i]);
  return bound;
}

CheckReport gronwall_check(const GronwallInstance& inst, double tol) {
  const auto bound = gronwall_bound(inst);
  CheckReport rep;
  for (std::size_t i = 0; i < inst.t.size(); ++i) {
    const double slacked = bound[i] * (1.0 + tol);
    const double margin =
        bound[i] > 0.0 ? inst.g[i] / bound[i] - 1.0
                       : (inst.g[i] > 0.0 ? std::numeric_limits<double>::infinity()
                                          : 0.0);
    rep.worst_margin = std::max(rep.worst_margin, margin);
    if (inst.g[i] > slacked && rep.passed) {
      rep.passed = false;
      rep.first_violation = i;
      rep.witness_t = inst.t[i];
      rep.detail = "g exceeds the envelope";
    }
  }
  if (rep.passed) rep.detail = "ok";
  return rep;
}

LimitReport audit_limits(const Schedule& schedule,
                         const std::vector<PathPoint>& path,
                         const std::vector<double>& checkpoints,
                         double epsilon) {
  if (path.empty() || path.front().t != 0.0)
    throw std::invalid_argument("audit_limits: path must start at t = 0");
  for (std::size_t i = 0; i + 1 < checkpoints.size(); ++i)
    if (!(checkpoints[i + 1] > checkpoints[i]))
      throw std::invalid_argument("audit_limits: checkpoints not increasing");

  std::vector<double> pt, ppsi;
  for (const auto& p : path) {
    pt.push_back(p.t);
    ppsi.push_back(p.psi);
  }

  // quadrature grid: log-spaced to the last checkpoint, starting at 0
  const double T = checkpoints.back();
  std::vector<double> grid{0.0};
  const int per_decade = 200;
  const double lo = 1e-6 * T;
  const int m = int(per_decade * std::log10(T / lo)) + 1;
  for (int i = 0; i <= m; ++i)
    grid.push_back(lo * std::pow(T / lo, double(i) / m));
  grid.back() = T;

  const std::size_t gn = grid.size();
  std::vector<double> phi(gn), gpsi(gn), gabs(gn);
  for (std::size_t i = 0; i < gn; ++i) {
    phi[i] = schedule.integral_phi(grid[i]);
    gabs[i] = std::abs(schedule.derivative(grid[i]));
    gpsi[i] = gabs[i] * lerp_at(pt, ppsi, grid[i]);
  }
  const auto logIpsi = log_weighted_cumulative(grid, phi, gpsi);
  const auto logIabs = log_weighted_cumulative(grid, phi, gabs);

  LimitReport rep;
  rep.checkpoints = checkpoints;
  for (double tc : checkpoints) {
    const auto it = std::lower_bound(grid.begin(), grid.end(), tc);
    const std::size_t k = std::min<std::size_t>(
        std::size_t(it - grid.begin()), gn - 1);
    const double ph = schedule.integral_phi(tc);
    const double a = schedule.value(tc);
    rep.phi.push_back(ph);
    rep.log_a_exp_phi.push_back(std::log(a) + ph);
    rep.weighted.push_back(std::exp(logIpsi[k] - phi[k]));
    rep.m_ratio.push_back(std::exp(logIabs[k] - phi[k]) / a);
    if (!rep.t_epsilon &&
        std::exp(logIabs[k] - phi[k]) < epsilon * a)
      rep.t_epsilon = tc;
  }

  rep.tail_ok = true;
  for (std::size_t i = 0; i + 1 < checkpoints.size(); ++i) {
    if (!(rep.phi[i + 1] > rep.phi[i])) rep.tail_ok = false;
    if (!(rep.log_a_exp_phi[i + 1] > rep.log_a_exp_phi[i]))
      rep.tail_ok = false;
    if (!(rep.weighted[i + 1] < rep.weighted[i])) rep.tail_ok = false;
    if (!(rep.m_ratio[i + 1] < rep.m_ratio[i])) rep.tail_ok = false;
  }
  rep.detail = rep.tail_ok ? "ok" : "tail relations violated";
  return rep;
}

CheckReport audit_aux33(const Schedule& schedule, double q,
                        const std::vector<PathPoint>& path, double rel_tol) {
  {
    auto cert = certify(schedule, ConditionId::eq26_q, q, 500);
    if (!cert.passed)
      throw std::invalid_argument(
          "audit_aux33: schedule fails the q-bounded (1/2) conditions");
  }
  if (path.empty() || path.front().t != 0.0)
    throw std::invalid_argument("audit_aux33: path must start at t = 0");

  std::vector<double> pt, ppsi;
  for (const auto& p : path) {
    pt.push_back(p.t);
    ppsi.push_back(p.psi);
  }
  const auto grid = refine_grid(pt, 16);
  const std::size_t gn = grid.size();
  std::vector<double> vphi(gn), g(gn);
  for (std::size_t i = 0; i < gn; ++i) {
    vphi[i] = (1.0 - q) * schedule.integral_phi(grid[i]);
    g[i] = std::abs(schedule.derivative(grid[i])) * lerp_at(pt, ppsi, grid[i]);
  }
  const auto logJ = log_weighted_cumulative(grid, vphi, g);

  CheckReport rep;
  const double factor = q / (1.0 - 2.0 * q);
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double t = path[k].t;
    // grid index of this sample (grid contains every path time)
    const auto it = std::lower_bound(grid.begin(), grid.end(), t);
    const std::size_t gi = std::size_t(it - grid.begin());
    const double lhs = std::exp(logJ[gi] - vphi[gi]);
    const double rhs = factor * path[k].a * path[k].psi;
    const double margin = rhs > 0.0 ? lhs / rhs - 1.0 : 0.0;
    rep.worst_margin = std::max(rep.worst_margin, margin);
    if (lhs > rhs * (1.0 + rel_tol) && rep.passed) {
      rep.passed = false;
      rep.first_violation = k;
      rep.witness_t = t;
      rep.detail = "weighted integral exceeds q/(1-2q) a psi";
    }
  }
  if (rep.passed) rep.detail = "ok";
  return rep;
}

}  // namespace dsm
