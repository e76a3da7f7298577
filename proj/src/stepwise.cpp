#include "readtrace/stepwise.hpp"

#include <algorithm>

namespace readtrace {

namespace {

bool contains(std::span<const Term> terms, const Term& t) {
  return std::find(terms.begin(), terms.end(), t) != terms.end();
}

std::vector<Term> components(const Term& t) {
  std::vector<Term> out;
  if (t.factor) out.push_back(Term{{}, t.factor});
  for (const auto& v : t.numeric) out.push_back(Term{{v}, std::nullopt});
  return out;
}

bool eligible(const Term& candidate, std::span<const Term> model, std::span<const Term> pool) {
  if (candidate.order() < 2) return true;
  for (const Term& parent : components(candidate))
    if (!contains(model, parent) && !contains(pool, parent)) return false;
  return true;
}

StepwisePath run_path(const Dataset& data, const std::string& response, std::vector<Term> model,
                      std::span<const Term> pool, const StepwiseOptions& options) {
  StepwisePath path;
  path.start = model;
  path.models.push_back(ols_fit(data, response, model, options.fit));

  while (true) {
    StepwiseStep step;
    const RegressionReport& current = path.models.back();
    std::optional<std::size_t> best;
    std::optional<RegressionReport> best_fit;
    for (const Term& cand : pool) {
      if (contains(model, cand) || !eligible(cand, model, pool)) continue;
      std::vector<Term> trial = model;
      trial.push_back(cand);
      RegressionReport fit;
      try {
        fit = ols_fit(data, response, trial, options.fit);
      } catch (const Error&) {
        continue;  // dependent on the current model
      }
      CandidateTest ct{cand.label(), partial_f(current, fit), fit.r2};
      const bool better = !best || ct.test.p < step.candidates[*best].test.p ||
                          (ct.test.p == step.candidates[*best].test.p && ct.r2 > step.candidates[*best].r2);
      step.candidates.push_back(std::move(ct));
      if (better) {
        best = step.candidates.size() - 1;
        best_fit = std::move(fit);
      }
    }
    if (!best || !(step.candidates[*best].test.p < options.alpha)) {
      path.steps.push_back(std::move(step));
      break;
    }
    step.added = step.candidates[*best].term;
    path.comparisons.push_back(step.candidates[*best].test);
    model.push_back(Term::parse(step.added));
    path.models.push_back(std::move(*best_fit));
    path.steps.push_back(std::move(step));
  }
  path.terms = std::move(model);
  return path;
}

}  // namespace

StepwiseResult stepwise_select(const Dataset& data, const std::string& response, std::span<const Term> base,
                               std::span<const Term> pool, const StepwiseOptions& options,
                               std::span<const std::vector<Term>> starts) {
  StepwiseResult result;
  std::vector<std::vector<Term>> initial;
  if (starts.empty()) {
    initial.emplace_back(base.begin(), base.end());
  } else {
    for (const auto& s : starts) {
      std::vector<Term> model(base.begin(), base.end());
      for (const Term& t : s)
        if (!contains(model, t)) model.push_back(t);
      initial.push_back(std::move(model));
    }
  }
  for (auto& model : initial) result.paths.push_back(run_path(data, response, std::move(model), pool, options));

  for (std::size_t i = 1; i < result.paths.size(); ++i) {
    const auto& a = result.paths[i];
    const auto& b = result.paths[result.chosen];
    if (a.terms.size() > b.terms.size() ||
        (a.terms.size() == b.terms.size() && a.models.back().r2 > b.models.back().r2))
      result.chosen = i;
  }
  result.report = result.paths[result.chosen].models.back();
  result.terms = result.paths[result.chosen].terms;
  return result;
}

}  // namespace readtrace
