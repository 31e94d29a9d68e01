#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dsm/path.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

/// Sampled data for the integral-inequality certifier: nonnegative g with
/// decay rate alpha and source beta on an increasing grid. The certified
/// envelope is g(0) e^{-phi(t)} + e^{-phi(t)} int_0^t e^{phi} beta ds with
/// phi = int_0^t alpha.
struct GronwallInstance {
  std::vector<double> t;
  std::vector<double> g;
  std::vector<double> alpha;
  std::vector<double> beta;

  void validate() const;
};

/// Envelope values on the instance's grid. Exponential weights are handled
/// in log space; segments use an exponentially weighted trapezoid so large
/// phi neither overflows nor smears the integral.
std::vector<double> gronwall_bound(const GronwallInstance& inst);

struct CheckReport {
  bool passed = true;
  std::optional<std::size_t> first_violation;
  std::optional<double> witness_t;
  double worst_margin = 0.0;  // max over grid of lhs/rhs - 1
  std::string detail;
};

/// Checks g(t) <= bound(t) * (1 + tol) at all grid points.
CheckReport gronwall_check(const GronwallInstance& inst, double tol);

struct LimitReport {
  std::vector<double> checkpoints;
  std::vector<double> phi;            // int_0^t a
  std::vector<double> log_a_exp_phi;  // log(a(t)) + phi(t), divergence proxy
  std::vector<double> weighted;     // e^{-phi} int e^{phi}|a'| psi ds
  std::vector<double> m_ratio;      // e^{-phi} int e^{phi}|a'| ds / a(t)
  std::optional<double> t_epsilon;  // first checkpoint with the
                                    // |a'|-integral below eps*a(t)
  bool tail_ok = false;             // divergence + tail decrease hold
  std::string detail;
};

/// Tail audit of the schedule limit relations along a computed path; the
/// checkpoints must be increasing and within the schedule horizon.
LimitReport audit_limits(const Schedule& schedule,
                         const std::vector<PathPoint>& path,
                         const std::vector<double>& checkpoints,
                         double epsilon = 1e-2);

/// Audit of the weighted-integral inequality
///   e^{-vphi(t)} int_0^t e^{vphi} |a'| psi ds <= q/(1-2q) a(t) psi(t),
/// vphi = (1-q) int_0^t a, at every path sample. Requires the schedule to
/// certify the q-bounded (1/2) conditions.
CheckReport audit_aux33(const Schedule& schedule, double q,
                        const std::vector<PathPoint>& path,
                        double rel_tol = 1e-8);

/// Exponentially weighted integral int_0^{t_k} e^{phi(s)} g(s) ds returned
/// as log values at each grid point; phi given at the grid points, g >= 0
/// interpolated linearly. Shared by the audits.
std::vector<double> log_weighted_cumulative(const std::vector<double>& t,
                                            const std::vector<double>& phi,
                                            const std::vector<double>& g);

}  // namespace dsm
