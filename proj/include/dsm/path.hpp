#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "dsm/problems.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

/// One sample of the regularized path t -> V(t), where V solves
/// F(V) + a(t) V = f_delta to the recorded residual.
struct PathPoint {
  double t = 0.0;
  double a = 0.0;
  HVector V;
  double psi = 0.0;       // ||V||
  double phi_d = 0.0;     // a * ||V|| = ||F(V) - f_delta|| up to residual
  double residual = 0.0;  // achieved ||F(V) + aV - f_delta||
};

struct NonConvergenceError : std::runtime_error {
  NonConvergenceError(const std::string& what, double best)
      : std::runtime_error(what), best_residual(best) {}
  double best_residual;
};

/// Default solver tolerance: fine enough to resolve quantities of size
/// a*||V|| and delta along the path.
double default_path_tol(double a, double delta);

/// Solve F(V) + aV = f_delta by damped fixed-point iteration
/// V <- V - lambda (F(V) + aV - f_delta) with residual backtracking on
/// lambda. Warm start from V_init when given.
PathPoint solve_regularized(const MonotoneOperator& F, double a,
                            const HVector& f_delta, double tol,
                            const HVector* V_init = nullptr,
                            long max_iters = 4000000);

/// Sample the path at increasing times, warm-starting each solve from the
/// previous one. Requires ||F(0) - f_delta|| > 0 (nondegenerate path).
std::vector<PathPoint> sample_path(const MonotoneOperator& F,
                                   const Schedule& schedule,
                                   const HVector& f_delta,
                                   const std::vector<double>& times,
                                   double delta,
                                   std::optional<double> tol = std::nullopt);

/// Same with exact data (delta = 0); the noiseless path V(t).
std::vector<PathPoint> noiseless_path(const MonotoneOperator& F,
                                      const Schedule& schedule,
                                      const HVector& f,
                                      const std::vector<double>& times,
                                      std::optional<double> tol = std::nullopt);

/// Direct dense solve of (A + aI) V = rhs by Cholesky; cross-check oracle
/// for linear problems, independent of the fixed-point route.
std::vector<double> solve_spd_shifted(const DenseMatrix& A, double a,
                                      const std::vector<double>& rhs);

}  // namespace dsm
