#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "readtrace/ingest.hpp"

namespace readtrace {

/// Mean of the item scores.
double scale_score(const QuestionnaireResponse& response);

/// Cronbach's alpha of an n_respondents x k_items matrix, with n-1 sample
/// variances. nullopt when the row sums have zero variance.
template <class Derived>
std::optional<typename Derived::Scalar> cronbach_alpha(const Eigen::MatrixBase<Derived>& items) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = items.rows();
  const Eigen::Index k = items.cols();
  if (n < 2 || k < 2) throw Error("cronbach_alpha needs at least 2 respondents and 2 items");
  auto sample_var = [n](const auto& v) {
    const Scalar mean = v.mean();
    return (v.array() - mean).square().sum() / Scalar(n - 1);
  };
  Scalar item_var = 0;
  for (Eigen::Index j = 0; j < k; ++j) item_var += sample_var(items.col(j));
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> totals = items.rowwise().sum();
  const Scalar total_var = sample_var(totals);
  if (total_var <= Scalar(0)) return std::nullopt;
  return Scalar(k) / Scalar(k - 1) * (Scalar(1) - item_var / total_var);
}

struct ScaleScores {
  std::optional<double> deci;
  std::optional<double> dece;
  std::optional<double> mw_s;
  std::optional<double> mw_d;

  std::optional<double>* slot(const std::string& scale_id);
};

struct ScaleReliability {
  std::string scale_id;
  std::size_t n_respondents = 0;
  std::optional<double> alpha;
};

struct ScoredScales {
  std::map<std::string, ScaleScores> by_student;
  std::vector<ScaleReliability> reliability;
};

/// Scale means per student and alpha per scale over every respondent of that scale.
ScoredScales score_scales(std::span<const QuestionnaireResponse> responses);

}  // namespace readtrace
