#pragma once

#include <cmath>
#include <limits>

namespace dsm::detail {

// log(exp(a) + exp(b)) without overflow
inline double logaddexp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log of integral over one segment of exp(phi(s)) * g(s), s in [s0, s0+ds],
// with phi linearized between its endpoint values and g >= 0 linear.
// Computed relative to the right endpoint so large phi never overflows:
//   I = exp(phi1) * int_0^ds exp(-k r) (g1 - m r) dr,   r = ds - s.
inline double log_exp_weighted_segment(double phi0, double phi1, double g0,
                                       double g1, double ds) {
  if (ds <= 0.0 || (g0 <= 0.0 && g1 <= 0.0))
    return -std::numeric_limits<double>::infinity();
  const double k = (phi1 - phi0) / ds;
  const double m = (g1 - g0) / ds;
  double integral;
  if (std::abs(k) * ds < 1e-8) {
    integral = 0.5 * (g0 + g1) * ds;  // flat weight: plain trapezoid
  } else {
    const double em = -std::expm1(-k * ds);           // 1 - e^{-k ds}
    const double j0 = em / k;                          // int e^{-kr} dr
    const double j1 = (ds * (1.0 - em) - j0) / (-k);   // int r e^{-kr} dr
    integral = g1 * j0 - m * j1;
  }
  if (!(integral > 0.0)) return -std::numeric_limits<double>::infinity();
  return phi1 + std::log(integral);
}

}  // namespace dsm::detail
