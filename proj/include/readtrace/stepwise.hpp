#pragma once

// Forward stepwise selection driven by partial F-tests.

#include <span>
#include <string>
#include <vector>

#include "readtrace/regression.hpp"

namespace readtrace {

struct CandidateTest {
  std::string term;
  FTestResult test;
  double r2 = 0;
};

struct StepwiseStep {
  std::vector<CandidateTest> candidates;  // every eligible candidate evaluated at this step
  std::string added;                      // empty when nothing qualified
};

struct StepwisePath {
  std::vector<Term> start;
  std::vector<StepwiseStep> steps;
  std::vector<Term> terms;                 // final model terms
  std::vector<RegressionReport> models;    // start model, then one per addition
  std::vector<FTestResult> comparisons;    // partial F between successive models
};

struct StepwiseResult {
  RegressionReport report;
  std::vector<Term> terms;
  std::vector<StepwisePath> paths;
  std::size_t chosen = 0;
};

struct StepwiseOptions {
  double alpha = 0.05;
  FitOptions fit;
};

/// Forward selection from `base` (+ each entry of `starts`, one path per
/// start; a single path when `starts` is empty). Each step adds the eligible
/// pool term with the smallest partial-F p-value if it is below alpha. A
/// product term is eligible when each of its components is in the model or
/// in the pool. Among the final models the largest wins, ties going to the
/// higher R^2.
StepwiseResult stepwise_select(const Dataset& data, const std::string& response, std::span<const Term> base,
                               std::span<const Term> pool, const StepwiseOptions& options = {},
                               std::span<const std::vector<Term>> starts = {});

}  // namespace readtrace
