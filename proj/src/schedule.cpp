#include "dsm/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsm {

Schedule Schedule::power(double d, double c, double b, double t_max) {
  if (!(d > 0.0) || !(c > 0.0) || !(b > 0.0 && b < 1.0) || !(t_max > 0.0))
    throw std::invalid_argument(
        "Schedule::power: need d>0, c>0, b in (0,1), t_max>0");
  Schedule s;
  s.kind_ = Kind::Power;
  s.d_ = d;
  s.c_ = c;
  s.b_ = b;
  s.t_max_ = t_max;
  return s;
}

Schedule Schedule::from_samples(std::vector<double> t, std::vector<double> a) {
  if (t.size() != a.size() || t.size() < 3)
    throw std::invalid_argument("Schedule::from_samples: need >= 3 samples");
  if (t.front() != 0.0)
    throw std::invalid_argument("Schedule::from_samples: t must start at 0");
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (!(t[i + 1] > t[i]))
      throw std::invalid_argument("Schedule::from_samples: t not increasing");
    if (!(a[i + 1] < a[i]))
      throw std::invalid_argument("Schedule::from_samples: a not decreasing");
  }
  if (!(a.back() > 0.0))
    throw std::invalid_argument("Schedule::from_samples: a must stay positive");

  Schedule s;
  s.kind_ = Kind::Sampled;
  s.t_max_ = t.back();
  const std::size_t n = t.size();

  // Fritsch-Carlson monotone cubic slopes.
  std::vector<double> h(n - 1), delta(n - 1), m(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = t[i + 1] - t[i];
    delta[i] = (a[i + 1] - a[i]) / h[i];
  }
  m[0] = delta[0];
  m[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0)
      m[i] = 0.0;
    else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (delta[i] == 0.0) {
      m[i] = m[i + 1] = 0.0;
      continue;
    }
    const double al = m[i] / delta[i], be = m[i + 1] / delta[i];
    const double r = al * al + be * be;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      m[i] = tau * al * delta[i];
      m[i + 1] = tau * be * delta[i];
    }
  }
  s.ts_ = std::move(t);
  s.as_ = std::move(a);
  s.slopes_ = std::move(m);

  // Exact integrals of the cubic segments, accumulated.
  s.seg_integral_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double hi = h[i];
    const double integral =
        hi * (0.5 * (s.as_[i] + s.as_[i + 1]) +
              hi * (s.slopes_[i] - s.slopes_[i + 1]) / 12.0);
    s.seg_integral_[i + 1] = s.seg_integral_[i] + integral;
  }
  return s;
}

std::size_t Schedule::segment(double t) const {
  auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  std::size_t i = std::size_t(it - ts_.begin());
  if (i == 0) return 0;
  if (i >= ts_.size()) return ts_.size() - 2;
  return i - 1;
}

double Schedule::value(double t) const {
  if (t < 0.0) throw std::invalid_argument("Schedule::value: t < 0");
  if (kind_ == Kind::Power) return d_ / std::pow(c_ + t, b_);
  if (t > ts_.back())
    throw std::invalid_argument("Schedule::value: t beyond sampled horizon");
  const std::size_t i = segment(t);
  const double h = ts_[i + 1] - ts_[i], x = (t - ts_[i]) / h;
  const double h00 = (1 + 2 * x) * (1 - x) * (1 - x);
  const double h10 = x * (1 - x) * (1 - x);
  const double h01 = x * x * (3 - 2 * x);
  const double h11 = x * x * (x - 1);
  return h00 * as_[i] + h10 * h * slopes_[i] + h01 * as_[i + 1] +
         h11 * h * slopes_[i + 1];
}

double Schedule::derivative(double t) const {
  if (t < 0.0) throw std::invalid_argument("Schedule::derivative: t < 0");
  if (kind_ == Kind::Power) return -b_ * d_ / std::pow(c_ + t, b_ + 1.0);
  if (t > ts_.back())
    throw std::invalid_argument("Schedule::derivative: t beyond horizon");
  const std::size_t i = segment(t);
  const double h = ts_[i + 1] - ts_[i], x = (t - ts_[i]) / h;
  const double d00 = 6 * x * (x - 1) / h;
  const double d10 = (3 * x - 1) * (x - 1);
  const double d01 = -6 * x * (x - 1) / h;
  const double d11 = x * (3 * x - 2);
  return d00 * as_[i] + d10 * slopes_[i] + d01 * as_[i + 1] +
         d11 * slopes_[i + 1];
}

double Schedule::integral_phi(double t) const {
  if (t < 0.0) throw std::invalid_argument("Schedule::integral_phi: t < 0");
  if (kind_ == Kind::Power) {
    const double e = 1.0 - b_;
    return d_ * (std::pow(c_ + t, e) - std::pow(c_, e)) / e;
  }
  if (t > ts_.back())
    throw std::invalid_argument("Schedule::integral_phi: t beyond horizon");
  const std::size_t i = segment(t);
  // integrate the Hermite cubic from ts_[i] to t
  const double h = ts_[i + 1] - ts_[i], x = (t - ts_[i]) / h;
  const double x2 = x * x, x3 = x2 * x, x4 = x3 * x;
  const double i00 = x - x3 + 0.5 * x4;
  const double i10 = 0.5 * x2 - (2.0 / 3.0) * x3 + 0.25 * x4;
  const double i01 = x3 - 0.5 * x4;
  const double i11 = 0.25 * x4 - x3 / 3.0;
  const double part = h * (i00 * as_[i] + i10 * h * slopes_[i] +
                           i01 * as_[i + 1] + i11 * h * slopes_[i + 1]);
  return seg_integral_[i] + part;
}

double Schedule::ratio(double t) const {
  const double a = value(t);
  return std::abs(derivative(t)) / (a * a);
}

std::string condition_name(ConditionId id) {
  switch (id) {
    case ConditionId::eq28: return "decay";
    case ConditionId::eq26_q: return "q-bounded(1/2)";
    case ConditionId::eq46_q: return "q-bounded(1/3)";
  }
  return "?";
}

ConditionCertificate certify(const Schedule& s, ConditionId id,
                             std::optional<double> q, int grid) {
  ConditionCertificate cert;
  cert.condition_id = id;
  cert.q = q;
  if (id != ConditionId::eq28) {
    if (!q)
      throw std::invalid_argument("certify: q required for q-bounded checks");
    const double cap = (id == ConditionId::eq26_q) ? 0.5 : 1.0 / 3.0;
    if (!(*q > 0.0 && *q < cap))
      throw std::invalid_argument("certify: q outside admissible interval");
  }

  // t = 0 plus a log-spaced grid up to t_max
  std::vector<double> ts;
  ts.push_back(0.0);
  const double lo = std::min(1e-3, s.t_max() / grid);
  for (int i = 0; i <= grid; ++i)
    ts.push_back(lo * std::pow(s.t_max() / lo, double(i) / grid));

  double prev_a = 0.0, prev_r = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    const double a = s.value(t), r = s.ratio(t);
    auto fail = [&](const std::string& why) {
      cert.passed = false;
      cert.witness = t;
      cert.detail = why;
    };
    if (!(a > 0.0)) {
      fail("a(t) not positive");
      return cert;
    }
    if (!(r > 0.0)) {
      fail("|a'|/a^2 not positive");
      return cert;
    }
    if (i > 0 && !(a < prev_a)) {
      fail("a(t) not decreasing");
      return cert;
    }
    if (i > 0 && !(r < prev_r * (1.0 + 1e-12))) {
      fail("|a'|/a^2 not decreasing");
      return cert;
    }
    if (id != ConditionId::eq28 && !(r < *q)) {
      fail("|a'|/a^2 >= q");
      return cert;
    }
    prev_a = a;
    prev_r = r;
  }
  if (id != ConditionId::eq28 && s.is_power()) {
    // closed-form admissibility for the power family
    const double bound = s.b() / (*q) * std::pow(s.c(), s.b() - 1.0);
    if (!(s.d() > bound)) {
      cert.passed = false;
      cert.witness = 0.0;
      cert.detail = "d <= b q^{-1} c^{b-1}";
      return cert;
    }
  }
  cert.passed = true;
  cert.detail = "ok";
  return cert;
}

}  // namespace dsm
