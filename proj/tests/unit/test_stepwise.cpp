#include "doctest.h"

#include <algorithm>
#include <random>

#include "readtrace/stepwise.hpp"

using namespace readtrace;

namespace {

Dataset planted(std::mt19937_64& rng, std::size_t n, double effect_a, double effect_ab = 0) {
  std::normal_distribution<double> z;
  Eigen::VectorXd a(n), b(n), c(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i) = z(rng);
    b(i) = z(rng);
    c(i) = z(rng);
    y(i) = 1 + effect_a * a(i) + effect_ab * a(i) * b(i) + z(rng);
  }
  Dataset d(n);
  d.add_numeric("a", a);
  d.add_numeric("b", b);
  d.add_numeric("c", c);
  d.add_numeric("y", y);
  return d;
}

std::vector<Term> terms(std::initializer_list<const char*> labels) {
  std::vector<Term> out;
  for (auto l : labels) out.push_back(Term::parse(l));
  return out;
}

}  // namespace

TEST_CASE("stepwise recovers a single planted predictor") {
  std::mt19937_64 rng(41);
  const auto pool = terms({"a", "b", "c"});
  int exact = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    const auto d = planted(rng, 150, 0.6);
    const auto r = stepwise_select(d, "y", {}, pool, StepwiseOptions{0.001, {}});
    if (r.terms.size() == 1 && r.terms[0] == Term::parse("a")) ++exact;
  }
  CHECK(exact >= 0.99 * reps);
}

TEST_CASE("steps record the candidates and partial F tests") {
  std::mt19937_64 rng(42);
  const auto d = planted(rng, 200, 0.8, 0.6);
  const auto pool = terms({"a", "b", "c", "a:b"});
  const auto r = stepwise_select(d, "y", {}, pool, StepwiseOptions{0.01, {}});
  REQUIRE(r.paths.size() == 1);
  const auto& path = r.paths[0];
  CHECK(path.models.size() == path.terms.size() + 1);
  CHECK(path.comparisons.size() == path.terms.size());
  CHECK(std::find(r.terms.begin(), r.terms.end(), Term::parse("a:b")) != r.terms.end());
  CHECK(path.steps.front().added == "a");
  CHECK(path.steps.back().added.empty());
  for (const auto& c : path.comparisons) CHECK(c.p < 0.01);
}

TEST_CASE("products wait for their components") {
  std::mt19937_64 rng(43);
  const auto d = planted(rng, 200, 0.8, 0.6);
  // b is not offered, so a:b may never enter.
  const auto pool = terms({"a", "c", "a:b"});
  const auto r = stepwise_select(d, "y", {}, pool, StepwiseOptions{0.05, {}});
  for (const auto& step : r.paths[0].steps)
    for (const auto& c : step.candidates) CHECK(c.term != "a:b");
}

TEST_CASE("multiple starts keep the largest final model") {
  std::mt19937_64 rng(44);
  const auto d = planted(rng, 200, 0.8);
  const auto pool = terms({"a", "b", "c"});
  const std::vector<std::vector<Term>> starts = {terms({"c"}), terms({"a"})};
  const auto r = stepwise_select(d, "y", {}, pool, StepwiseOptions{0.05, {}}, starts);
  REQUIRE(r.paths.size() == 2);
  std::size_t best = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& p = r.paths[i];
    const auto& q = r.paths[best];
    if (p.terms.size() > q.terms.size() ||
        (p.terms.size() == q.terms.size() && p.models.back().r2 > q.models.back().r2))
      best = i;
  }
  CHECK(r.chosen == best);
  CHECK(r.report.r2 == doctest::Approx(r.paths[best].models.back().r2));
  // The forced start term stays in its path.
  CHECK(std::find(r.paths[0].terms.begin(), r.paths[0].terms.end(), Term::parse("c")) != r.paths[0].terms.end());
}

TEST_CASE("base terms are kept and nothing is added under the null") {
  std::mt19937_64 rng(45);
  const auto d = planted(rng, 120, 0.0);
  const auto r = stepwise_select(d, "y", terms({"b"}), terms({"c"}), StepwiseOptions{1e-6, {}});
  REQUIRE(r.terms.size() == 1);
  CHECK(r.terms[0] == Term::parse("b"));
}
