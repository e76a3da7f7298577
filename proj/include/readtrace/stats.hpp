#pragma once

// Descriptive statistics and Pearson correlation over Eigen vectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>

#include <Eigen/Core>

#include "readtrace/core.hpp"
#include "readtrace/distributions.hpp"

namespace readtrace {

template <class Scalar = double>
struct Descriptives {
  std::size_t n = 0;
  Scalar mean = 0;
  std::optional<Scalar> sd;               // n-1 denominator; needs n >= 2
  std::optional<Scalar> skewness;         // adjusted Fisher-Pearson; n >= 3, sd > 0
  std::optional<Scalar> excess_kurtosis;  // sample-adjusted; n >= 4, sd > 0
};

template <class Derived>
Descriptives<typename Derived::Scalar> descriptives(const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  Descriptives<Scalar> d;
  d.n = static_cast<std::size_t>(values.size());
  if (d.n == 0) throw Error("descriptives of an empty sample");
  d.mean = values.mean();
  if (d.n < 2) return d;

  const auto centered = (values.array() - d.mean).eval();
  const Scalar n = Scalar(d.n);
  const Scalar m2 = centered.square().sum() / n;
  d.sd = std::sqrt(centered.square().sum() / (n - 1));
  if (!(m2 > Scalar(0))) return d;

  if (d.n >= 3) {
    const Scalar g1 = centered.cube().sum() / n / std::pow(m2, Scalar(1.5));
    d.skewness = std::sqrt(n * (n - 1)) / (n - 2) * g1;
  }
  if (d.n >= 4) {
    const Scalar g2 = centered.square().square().sum() / n / (m2 * m2) - 3;
    d.excess_kurtosis = ((n + 1) * g2 + 6) * (n - 1) / ((n - 2) * (n - 3));
  }
  return d;
}

struct Correlation {
  double r = 0;
  double p = 1;
  std::size_t n = 0;
};

/// Product-moment r with a two-tailed t-test on n-2 df. nullopt when either
/// input is constant.
template <class DerivedX, class DerivedY>
std::optional<Correlation> pearson(const Eigen::MatrixBase<DerivedX>& x,
                                   const Eigen::MatrixBase<DerivedY>& y) {
  if (x.size() != y.size()) throw Error("pearson: inputs differ in length");
  if (x.size() < 3) throw Error("pearson: needs at least 3 observations");
  const auto dx = (x.array().template cast<double>() - x.template cast<double>().mean()).eval();
  const auto dy = (y.array().template cast<double>() - y.template cast<double>().mean()).eval();
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  if (!(sxx > 0) || !(syy > 0)) return std::nullopt;

  Correlation c;
  c.n = static_cast<std::size_t>(x.size());
  c.r = std::clamp((dx * dy).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(c.n) - 2.0;
  const double one_minus = 1.0 - c.r * c.r;
  c.p = one_minus <= 0 ? 0.0 : student_t_two_tailed_p(c.r * std::sqrt(df / one_minus), df);
  return c;
}

}  // namespace readtrace
