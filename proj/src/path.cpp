#include "dsm/path.hpp"

#include <algorithm>
#include <cmath>

namespace dsm {

double default_path_tol(double a, double delta) {
  if (delta > 0.0)
    return std::max(1e-13, std::min(1e-10, 1e-3 * a * delta));
  return 1e-10;
}

namespace {

// Sampled local Lipschitz estimate of F near u, for the initial step size.
double local_lipschitz(const MonotoneOperator& F, const HVector& u) {
  const auto& w = u.weights();
  std::vector<double> fu(u.size()), fv(u.size()), v(u.size()), diff(u.size());
  F.apply_into(u.coords(), fu);
  const double eps = 1e-4 * (1.0 + norm(u));
  double best = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    v = u.coords();
    v[k] += eps;
    F.apply_into(v, fv);
    for (std::size_t i = 0; i < u.size(); ++i) diff[i] = fv[i] - fu[i];
    const double num = norm_raw(diff, w);
    v[k] = u[k];
    v[k] -= eps;  // keep symmetric probing around kinks
    F.apply_into(v, fv);
    for (std::size_t i = 0; i < u.size(); ++i) diff[i] = fu[i] - fv[i];
    const double den = eps * std::sqrt(w[k]);
    best = std::max({best, num / den, norm_raw(diff, w) / den});
  }
  return best;
}

}  // namespace

PathPoint solve_regularized(const MonotoneOperator& F, double a,
                            const HVector& f_delta, double tol,
                            const HVector* V_init, long max_iters) {
  if (!(a > 0.0)) throw std::invalid_argument("solve_regularized: a <= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_regularized: tol <= 0");
  if (F.dim != f_delta.size())
    throw std::invalid_argument("solve_regularized: dimension mismatch");

  const auto& w = f_delta.weights();
  HVector V = V_init ? *V_init : f_delta.zeros_like();
  const std::size_t n = V.size();
  std::vector<double> fv(n), res(n), cand(n), fcand(n), rescand(n);

  auto residual_at = [&](const std::vector<double>& x,
                         std::vector<double>& fx, std::vector<double>& rx) {
    F.apply_into(x, fx);
    for (std::size_t i = 0; i < n; ++i)
      rx[i] = fx[i] + a * x[i] - f_delta[i];
    return norm_raw(rx, w);
  };

  double rnorm = residual_at(V.coords(), fv, res);
  const double lhat = std::max(local_lipschitz(F, V), 1e-12);
  double lambda = a / ((a + lhat) * (a + lhat));
  lambda = std::min(std::max(lambda, 1e-12), 1.9 / (a + lhat));

  long iters = 0;
  double best = rnorm;
  while (rnorm > tol) {
    if (iters++ > max_iters)
      throw NonConvergenceError("solve_regularized: iteration budget exhausted",
                                best);
    for (std::size_t i = 0; i < n; ++i) cand[i] = V[i] - lambda * res[i];
    const double rc = residual_at(cand, fcand, rescand);
    if (rc < rnorm) {
      V.coords().swap(cand);
      fv.swap(fcand);
      res.swap(rescand);
      rnorm = rc;
      best = std::min(best, rnorm);
      lambda *= 1.1;
    } else {
      lambda *= 0.5;
      if (lambda < 1e-18)
        throw NonConvergenceError("solve_regularized: step size underflow",
                                  best);
    }
  }

  PathPoint p;
  p.t = 0.0;
  p.a = a;
  p.psi = norm(V);
  p.phi_d = a * p.psi;
  p.residual = rnorm;
  p.V = std::move(V);
  return p;
}

std::vector<PathPoint> sample_path(const MonotoneOperator& F,
                                   const Schedule& schedule,
                                   const HVector& f_delta,
                                   const std::vector<double>& times,
                                   double delta, std::optional<double> tol) {
  if (times.empty()) throw std::invalid_argument("sample_path: empty times");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i + 1] > times[i]) || times[i] < 0.0)
      throw std::invalid_argument("sample_path: times must be increasing, >=0");

  // Lemma-level degeneracy guard: the path diagnostics assume psi > 0.
  {
    HVector zero = f_delta.zeros_like();
    const HVector f0 = F.apply(zero);
    if (norm(f0 - f_delta) <= 1e-14)
      throw std::invalid_argument(
          "sample_path: ||F(0) - f_delta|| = 0, degenerate path");
  }

  std::vector<PathPoint> out;
  out.reserve(times.size());
  const HVector* warm = nullptr;
  for (double t : times) {
    const double a = schedule.value(t);
    const double tl = tol ? *tol : default_path_tol(a, delta);
    PathPoint p;
    try {
      p = solve_regularized(F, a, f_delta, tl, warm);
    } catch (NonConvergenceError& e) {
      throw NonConvergenceError(
          "sample_path: solver failed at t=" + std::to_string(t),
          e.best_residual);
    }
    p.t = t;
    out.push_back(std::move(p));
    warm = &out.back().V;
  }
  return out;
}

std::vector<PathPoint> noiseless_path(const MonotoneOperator& F,
                                      const Schedule& schedule,
                                      const HVector& f,
                                      const std::vector<double>& times,
                                      std::optional<double> tol) {
  return sample_path(F, schedule, f, times, 0.0, tol);
}

std::vector<double> solve_spd_shifted(const DenseMatrix& A, double a,
                                      const std::vector<double>& rhs) {
  const std::size_t n = A.size();
  if (rhs.size() != n)
    throw std::invalid_argument("solve_spd_shifted: size mismatch");
  // Cholesky of M = A + aI
  std::vector<std::vector<double>> L(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = A[i][j] + (i == j ? a : 0.0);
      for (std::size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      if (i == j) {
        if (s <= 0.0)
          throw std::runtime_error("solve_spd_shifted: matrix not SPD");
        L[i][i] = std::sqrt(s);
      } else {
        L[i][j] = s / L[j][j];
      }
    }
  }
  std::vector<double> y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= L[i][k] * y[k];
    y[i] = s / L[i][i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= L[k][ii] * x[k];
    x[ii] = s / L[ii][ii];
  }
  return x;
}

}  // namespace dsm
