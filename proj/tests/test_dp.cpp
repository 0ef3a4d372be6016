#include <doctest.h>

#include <cmath>

#include "privlq/analysis.hpp"
#include "privlq/errors.hpp"
#include "privlq/rng.hpp"

using namespace privlq;

namespace {

// Independent quantile oracle: bisection on Q(x) = erfc(x/sqrt(2))/2.
double quantile_by_bisection(double p) {
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double r_min_oracle(double epsilon, double gamma, double b) {
  const double K = quantile_by_bisection(gamma);
  return b / (2.0 * epsilon) * (K + std::sqrt(K * K + 2.0 * epsilon));
}

}  // namespace

TEST_CASE("normal quantile is accurate") {
  for (double p : {1e-6, 1e-3, 0.05, 0.2, 0.4999, 0.5, 0.9, 0.999}) {
    CHECK(std::abs(normal_quantile_upper(p) - quantile_by_bisection(p)) < 1e-10);
  }
  CHECK_THROWS_AS(normal_quantile_upper(0.0), ParameterOutOfRangeError);
  CHECK_THROWS_AS(normal_quantile_upper(1.0), ParameterOutOfRangeError);
}

TEST_CASE("dp calibration spot values") {
  const DpParams params = dp_calibrate(1.0, 0.05, 1.0);
  CHECK(std::abs(params.r_min - 1.9070) < 1e-3);
  CHECK(params.r_min == doctest::Approx(r_min_oracle(1.0, 0.05, 1.0)).epsilon(1e-9));

  // gamma near 1/2: K -> 0+ and r_min -> b sqrt(2 eps) / (2 eps) from above.
  const DpParams near_half = dp_calibrate(1.0, 0.499, 1.0);
  CHECK(near_half.r_min == doctest::Approx(r_min_oracle(1.0, 0.499, 1.0)).epsilon(1e-9));
  CHECK(near_half.r_min > std::sqrt(0.5));
  CHECK(near_half.r_min < std::sqrt(0.5) + 2e-3);

  const DpParams base = dp_calibrate(0.7, 0.1, 1.3);
  const DpParams doubled = dp_calibrate(0.7, 0.1, 2.6);
  CHECK(doubled.r_min == doctest::Approx(2.0 * base.r_min).epsilon(1e-15));
}

TEST_CASE("dp calibration rejects out-of-range parameters") {
  CHECK_THROWS_AS(dp_calibrate(0.0, 0.05, 1.0), ParameterOutOfRangeError);
  CHECK_THROWS_AS(dp_calibrate(1.0, 0.6, 1.0), ParameterOutOfRangeError);
  CHECK_THROWS_AS(dp_calibrate(1.0, 0.5, 1.0), ParameterOutOfRangeError);
  CHECK_THROWS_AS(dp_calibrate(1.0, 0.05, 0.0), ParameterOutOfRangeError);
  CHECK_THROWS_AS(dp_verify(-1.0, 1.0, 0.05, 1.0), ParameterOutOfRangeError);
}

TEST_CASE("dp verification brackets the calibrated radius") {
  const DpParams params = dp_calibrate(1.0, 0.05, 1.0);
  CHECK(dp_verify(params.r_min, 1.0, 0.05, 1.0));
  CHECK_FALSE(dp_verify(0.5 * params.r_min, 1.0, 0.05, 1.0));
  CHECK(dp_verify(10.0 * params.r_min, 1.0, 0.05, 1.0));
}

TEST_CASE("calibrate and verify are consistent for random parameters") {
  RngStream rng(31415, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const double epsilon = 0.1 + 3.0 * rng.uniform01();
    const double gamma = 0.002 + 0.45 * rng.uniform01();
    const double b = 0.1 + 4.0 * rng.uniform01();
    const DpParams params = dp_calibrate(epsilon, gamma, b);
    CHECK(dp_verify(params.r_min, epsilon, gamma, b));
    CHECK_FALSE(dp_verify(0.99 * params.r_min, epsilon, gamma, b));
  }
}
