#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "dsm/path.hpp"
#include "dsm/problems.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

/// Discrepancy-principle stopping rule: stop at the first t with
/// ||F(u(t)) - f_delta|| = C * delta^zeta.
struct StopRule {
  double C = 1.5;
  double zeta = 0.9;
  double crossing_rel_tol = 1e-9;  // |discrepancy - threshold| <= tol*threshold

  double threshold(double delta) const;
  void validate(double delta) const;  // C delta^zeta > delta must hold
};

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  double t_max = 1e6;
  double h0 = 0.0;              // 0 = automatic
  double record_factor = 1.08;  // log-spaced sample recording
  std::size_t max_samples = 200000;
};

struct TrajectorySample {
  double t;
  HVector u;
  double discrepancy;  // ||F(u) - f_delta||
  double a;
  double h;  // ||F(u) + a(t)(u - ubar) - f_delta||
};

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  std::optional<double> t_delta;
  std::optional<HVector> u_at_stop;
  bool stopped = false;
  double threshold = 0.0;
  long accepted_steps = 0;
  double final_discrepancy = 0.0;
};

struct InitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TimeoutError : std::runtime_error {
  TimeoutError(const std::string& what, double disc)
      : std::runtime_error(what), final_discrepancy(disc) {}
  double final_discrepancy;
};
struct StiffnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Integrate du/dt = -(F(u) + a(t) u - f_delta) until the discrepancy
/// crosses the stopping threshold (refined on dense output) or t_max.
TrajectoryRecord integrate(const MonotoneOperator& F, const Schedule& schedule,
                           const NoisyData& data, const HVector& u0,
                           const StopRule& rule,
                           const IntegratorOptions& opts = {});

/// Shifted flow du/dt = -(F(u) + a(t)(u - ubar) - f_delta); targets the
/// solution with minimal distance to ubar. ubar = 0 reduces to integrate.
TrajectoryRecord integrate_shifted(const MonotoneOperator& F,
                                   const Schedule& schedule,
                                   const NoisyData& data, const HVector& u0,
                                   const HVector& ubar, const StopRule& rule,
                                   const IntegratorOptions& opts = {});

struct InitCheck {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Report of the initialization conditions: the stopping-rule premise
/// ||F(u0)-f_delta|| > C delta^zeta > delta, and the two sufficient
/// conditions ||F(u0)+a(0)(u0-ubar)-f_delta|| <= p a(0)||V(0)|| with
/// p < 1 - q/(1-2q), or <= theta delta^zeta with theta < C.
struct InitCertificate {
  InitCheck premise;      // strict inequality chain at t = 0
  InitCheck small_h0_p;   // h(0) <= p a(0) ||V(0)||
  InitCheck small_h0_th;  // h(0) <= theta delta^zeta
  double p = 0.0;
  double p_ceiling = 0.0;  // 1 - q/(1-2q)
  double theta = 0.0;
};

InitCertificate check_init(const MonotoneOperator& F, const Schedule& schedule,
                           const NoisyData& data, const HVector& u0,
                           const std::optional<HVector>& ubar,
                           const StopRule& rule, double p, double q,
                           double theta);

}  // namespace dsm
