#include "readtrace/questionnaire.hpp"

#include <numeric>

namespace readtrace {

double scale_score(const QuestionnaireResponse& response) {
  if (response.item_scores.empty()) throw Error("response without items");
  const double sum = std::accumulate(response.item_scores.begin(), response.item_scores.end(), 0.0);
  return sum / static_cast<double>(response.item_scores.size());
}

std::optional<double>* ScaleScores::slot(const std::string& scale_id) {
  if (scale_id == "DECI") return &deci;
  if (scale_id == "DECE") return &dece;
  if (scale_id == "MW-S") return &mw_s;
  if (scale_id == "MW-D") return &mw_d;
  return nullptr;
}

ScoredScales score_scales(std::span<const QuestionnaireResponse> responses) {
  ScoredScales out;
  std::map<std::string, std::vector<const QuestionnaireResponse*>> by_scale;
  for (const auto& r : responses) {
    auto* slot = out.by_student[r.student_id].slot(r.scale_id);
    if (!slot) throw Error("unknown scale '" + r.scale_id + "'");
    *slot = scale_score(r);
    by_scale[r.scale_id].push_back(&r);
  }
  for (const char* scale : {"DECI", "DECE", "MW-S", "MW-D"}) {
    ScaleReliability rel{scale, 0, std::nullopt};
    auto it = by_scale.find(scale);
    if (it != by_scale.end()) {
      const auto& rows = it->second;
      rel.n_respondents = rows.size();
      const std::size_t k = rows.front()->item_scores.size();
      if (rows.size() >= 2 && k >= 2) {
        Eigen::MatrixXd items(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i]->item_scores.size() != k) throw Error(std::string("inconsistent item count for ") + scale);
          for (std::size_t j = 0; j < k; ++j)
            items(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i]->item_scores[j];
        }
        rel.alpha = cronbach_alpha(items);
      }
    }
    out.reliability.push_back(rel);
  }
  return out;
}

}  // namespace readtrace
