#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dsm/schedule.hpp"

using namespace dsm;

TEST_CASE("power schedule closed forms") {
  const auto s = Schedule::power(1.0, 1.0, 0.5);
  CHECK(s.value(0.0) == doctest::Approx(1.0));
  CHECK(s.value(3.0) == doctest::Approx(0.5));
  CHECK(Schedule::power(3.0, 1.0, 0.5).value(0.0) == doctest::Approx(3.0));

  CHECK(s.derivative(0.0) == doctest::Approx(-0.5));
  CHECK(s.derivative(7.0) < 0.0);
  // central finite difference at t = 2
  const double h = 1e-5;
  const double fd = (s.value(2.0 + h) - s.value(2.0 - h)) / (2.0 * h);
  CHECK(s.derivative(2.0) == doctest::Approx(fd).epsilon(1e-6));

  CHECK(s.integral_phi(0.0) == 0.0);
  CHECK(s.integral_phi(3.0) == doctest::Approx(2.0));
  CHECK(s.integral_phi(5.0) > s.integral_phi(4.0));

  CHECK(s.ratio(0.0) == doctest::Approx(0.5));
  CHECK(Schedule::power(4.0, 1.0, 0.5).ratio(0.0) == doctest::Approx(0.125));
  CHECK(s.ratio(10.0) < s.ratio(0.0));

  CHECK_THROWS_AS(s.value(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(s.derivative(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(s.integral_phi(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::power(1.0, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::power(-1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("certification") {
  const auto good = Schedule::power(3.0, 1.0, 0.5);
  CHECK(certify(good, ConditionId::eq28).passed);
  CHECK(certify(good, ConditionId::eq26_q, 0.25).passed);
  CHECK(certify(good, ConditionId::eq46_q, 0.25).passed);

  // d = 1 violates both the pointwise q bound and the closed-form
  // admissibility d > b q^{-1} c^{b-1} = 2; first failure at t = 0
  const auto bad = Schedule::power(1.0, 1.0, 0.5);
  const auto cert = certify(bad, ConditionId::eq26_q, 0.25);
  CHECK_FALSE(cert.passed);
  REQUIRE(cert.witness.has_value());
  CHECK(*cert.witness == 0.0);
  CHECK(certify(bad, ConditionId::eq28).passed);

  CHECK_THROWS_AS(certify(good, ConditionId::eq26_q), std::invalid_argument);
  CHECK_THROWS_AS(certify(good, ConditionId::eq26_q, 0.6),
                  std::invalid_argument);
  CHECK_THROWS_AS(certify(good, ConditionId::eq46_q, 0.4),
                  std::invalid_argument);

  CHECK(condition_name(ConditionId::eq28) == "decay");
}

TEST_CASE("sampled schedule interpolates a power schedule") {
  const auto ref = Schedule::power(3.0, 1.0, 0.5, 100.0);
  // log-spaced samples so the steep region near t = 0 is resolved
  std::vector<double> ts{0.0}, as{ref.value(0.0)};
  for (int i = 0; i <= 400; ++i) {
    const double t = 1e-3 * std::pow(1e5, double(i) / 400.0);
    ts.push_back(t);
    as.push_back(ref.value(t));
  }
  const auto s = Schedule::from_samples(ts, as);
  CHECK_FALSE(s.is_power());
  CHECK(s.t_max() == 100.0);
  for (double t : {0.0, 0.37, 3.0, 12.5, 50.0, 99.0}) {
    CHECK(s.value(t) == doctest::Approx(ref.value(t)).epsilon(1e-4));
    CHECK(s.derivative(t) == doctest::Approx(ref.derivative(t)).epsilon(5e-2));
    CHECK(s.integral_phi(t) ==
          doctest::Approx(ref.integral_phi(t)).epsilon(1e-4));
  }
  CHECK(s.value(30.0) > s.value(31.0));
  CHECK_THROWS_AS(s.value(101.0), std::invalid_argument);

  // structural rejections
  CHECK_THROWS_AS(Schedule::from_samples({0.0, 1.0}, {1.0, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Schedule::from_samples({0.0, 1.0, 2.0}, {1.0, 1.0, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Schedule::from_samples({0.5, 1.0, 2.0}, {1.0, 0.8, 0.5}),
                  std::invalid_argument);
}
