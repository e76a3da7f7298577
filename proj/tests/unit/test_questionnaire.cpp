#include "doctest.h"

#include <random>

#include "oracles/oracles.hpp"
#include "readtrace/questionnaire.hpp"

using namespace readtrace;

TEST_CASE("cronbach alpha matches the oracle") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> z;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 10 + t, k = 2 + t % 7;
    oracle::Matrix m(n, std::vector<double>(k));
    Eigen::MatrixXd e(n, k);
    for (std::size_t i = 0; i < n; ++i) {
      const double latent = z(rng);
      for (std::size_t j = 0; j < k; ++j) e(i, j) = m[i][j] = std::round(4 + latent + z(rng));
    }
    const auto a = cronbach_alpha(e);
    REQUIRE(a);
    CHECK(*a == doctest::Approx(oracle::cronbach_alpha(m)).epsilon(1e-10));
  }
}

TEST_CASE("cronbach alpha edge cases") {
  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(5, 3, 4.0);
  CHECK_FALSE(cronbach_alpha(flat));
  CHECK_THROWS_AS(cronbach_alpha(Eigen::MatrixXd::Ones(1, 3)), Error);
  CHECK_THROWS_AS(cronbach_alpha(Eigen::MatrixXd::Ones(4, 1)), Error);
  // Perfectly parallel items.
  Eigen::MatrixXd parallel(4, 3);
  parallel << 1, 1, 1, 2, 2, 2, 5, 5, 5, 7, 7, 7;
  CHECK(*cronbach_alpha(parallel) == doctest::Approx(1.0));
}

TEST_CASE("score_scales") {
  std::vector<QuestionnaireResponse> r = {
      {"S1", "DECI", {1, 2, 3, 4, 5, 6, 7, 4}},
      {"S2", "DECI", {2, 2, 3, 3, 5, 5, 6, 7}},
      {"S1", "MW-S", {4, 4, 4, 5}},
  };
  const auto s = score_scales(r);
  CHECK(*s.by_student.at("S1").deci == doctest::Approx(4.0));
  CHECK(*s.by_student.at("S1").mw_s == doctest::Approx(4.25));
  CHECK_FALSE(s.by_student.at("S2").dece);
  REQUIRE(s.reliability.size() == 4);
  CHECK(s.reliability[0].scale_id == "DECI");
  CHECK(s.reliability[0].n_respondents == 2);
  CHECK(s.reliability[0].alpha);
  CHECK(s.reliability[2].n_respondents == 1);
  CHECK_FALSE(s.reliability[2].alpha);
  CHECK(s.reliability[3].n_respondents == 0);

  std::vector<QuestionnaireResponse> bad = {{"S1", "XYZ", {1, 2}}};
  CHECK_THROWS_AS(score_scales(bad), Error);
}
