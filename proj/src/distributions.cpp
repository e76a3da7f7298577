#include "readtrace/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "readtrace/core.hpp"

namespace readtrace {

namespace {

constexpr int kMaxIterations = 20000;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a,b) / prefactor, valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) return h;
  }
  throw Error("reg_inc_beta: continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw Error("reg_inc_beta: a and b must be positive and finite");
  if (!(x >= 0.0 && x <= 1.0)) throw Error("reg_inc_beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_pdf(double t, double df) {
  const double log_norm = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                          0.5 * std::log(df * std::numbers::pi);
  return std::exp(log_norm - (df + 1.0) / 2.0 * std::log1p(t * t / df));
}

double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0.0)) throw Error("t distribution needs df > 0");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  return reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
}

double student_t_cdf(double t, double df) {
  const double tail = 0.5 * student_t_two_tailed_p(t, df);
  return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw Error("student_t_quantile: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, df);

  // Bracket, then safeguarded Newton on the CDF.
  double lo = 0.0;
  double hi = 1.0;
  while (student_t_cdf(hi, df) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double err = student_t_cdf(t, df) - p;
    if (err > 0) hi = t; else lo = t;
    double next = t - err / student_t_pdf(t, df);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - t) <= 1e-15 * std::max(1.0, std::fabs(t))) return next;
    t = next;
  }
  return t;
}

double f_sf(double f, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) throw Error("F distribution needs positive degrees of freedom");
  if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return reg_inc_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

double f_cdf(double f, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) throw Error("F distribution needs positive degrees of freedom");
  if (f <= 0.0) return 0.0;
  if (std::isinf(f)) return 1.0;
  return reg_inc_beta(df1 / 2.0, df2 / 2.0, df1 * f / (df1 * f + df2));
}

}  // namespace readtrace
