#pragma once

// Distribution functions for t and F tests, built on the regularized
// incomplete beta function.

namespace readtrace {

/// I_x(a, b) for a, b > 0 and x in [0, 1]. Continued fraction (modified
/// Lentz) with the x > (a+1)/(a+b+2) symmetry switch. Throws on domain errors.
double reg_inc_beta(double a, double b, double x);

double student_t_pdf(double t, double df);
double student_t_cdf(double t, double df);
/// P(|T| >= |t|).
double student_t_two_tailed_p(double t, double df);
/// Inverse CDF for p in (0, 1).
double student_t_quantile(double p, double df);

double f_cdf(double f, double df1, double df2);
/// Upper tail P(F >= f).
double f_sf(double f, double df1, double df2);

}  // namespace readtrace
