#include "doctest.h"

#include <cmath>

#include "oracles/oracles.hpp"
#include "readtrace/core.hpp"
#include "readtrace/distributions.hpp"

using namespace readtrace;

TEST_CASE("incomplete beta matches quadrature") {
  const double as[] = {0.5, 1, 2.5, 7, 30, 120};
  const double xs[] = {0.001, 0.05, 0.3, 0.5, 0.77, 0.999};
  for (double a : as)
    for (double b : as)
      for (double x : xs) {
        const double got = reg_inc_beta(a, b, x);
        const double want = static_cast<double>(oracle::inc_beta(a, b, x));
        CHECK(std::fabs(got - want) <= 1e-12 + 1e-9 * want);
      }
}

TEST_CASE("incomplete beta closed forms and domain") {
  CHECK(reg_inc_beta(1, 1, 0.3) == doctest::Approx(0.3));
  CHECK(reg_inc_beta(2, 1, 0.3) == doctest::Approx(0.09));
  CHECK(reg_inc_beta(1, 3, 0.5) == doctest::Approx(1 - 0.125));
  CHECK(reg_inc_beta(3, 4, 0) == 0);
  CHECK(reg_inc_beta(3, 4, 1) == 1);
  CHECK_THROWS_AS(reg_inc_beta(-1, 2, 0.5), Error);
  CHECK_THROWS_AS(reg_inc_beta(1, 2, 1.5), Error);
}

TEST_CASE("t distribution") {
  // Cauchy at df = 1.
  CHECK(student_t_cdf(1, 1) == doctest::Approx(0.75));
  CHECK(student_t_cdf(0, 9) == doctest::Approx(0.5));
  CHECK(student_t_two_tailed_p(2.0, 1e7) == doctest::Approx(std::erfc(2.0 / std::sqrt(2.0))).epsilon(1e-6));
  // Textbook critical values.
  CHECK(student_t_quantile(0.975, 10) == doctest::Approx(2.228138852).epsilon(1e-8));
  CHECK(student_t_quantile(0.995, 30) == doctest::Approx(2.749995654).epsilon(1e-8));
  for (double df : {2.0, 5.0, 96.0})
    for (double p : {0.01, 0.2, 0.5, 0.9, 0.999}) CHECK(student_t_cdf(student_t_quantile(p, df), df) == doctest::Approx(p));
  CHECK(student_t_pdf(0, 1) == doctest::Approx(1 / std::acos(-1.0)));
}

TEST_CASE("F distribution") {
  // P(F(d1, d2) <= f) = I_{d1 f / (d1 f + d2)}(d1/2, d2/2)
  for (double d1 : {1.0, 3.0, 8.0})
    for (double d2 : {5.0, 40.0, 200.0})
      for (double f : {0.2, 1.0, 3.5}) {
        const long double x = d1 * f / (d1 * f + d2);
        const double want = static_cast<double>(1 - oracle::inc_beta(d1 / 2, d2 / 2, x));
        CHECK(f_sf(f, d1, d2) == doctest::Approx(want).epsilon(1e-9));
        CHECK(f_cdf(f, d1, d2) + f_sf(f, d1, d2) == doctest::Approx(1.0));
      }
  CHECK(f_sf(0, 2, 10) == 1.0);
  // F(1, d) is t^2.
  CHECK(f_sf(4.0, 1, 20) == doctest::Approx(student_t_two_tailed_p(2.0, 20)));
}
