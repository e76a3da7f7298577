#pragma once

// Cohort feature extraction, profile joins and the two analysis workflows:
// trait/engagement models of grades (rq1) and sequence-metric strategies with
// cluster moderation (rq2).

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "readtrace/clustering.hpp"
#include "readtrace/config.hpp"
#include "readtrace/engagement.hpp"
#include "readtrace/ingest.hpp"
#include "readtrace/metrics.hpp"
#include "readtrace/questionnaire.hpp"
#include "readtrace/regression.hpp"
#include "readtrace/stats.hpp"
#include "readtrace/stepwise.hpp"

namespace readtrace {

struct CohortFeatures {
  std::vector<StudentMetrics> metrics;            // sorted by student_id
  std::vector<EngagementSubMetrics> submetrics;   // sorted by student_id
  std::vector<EngagementScore> engagement;        // sorted by student_id
  std::vector<std::string> warnings;

  std::map<std::string, double> engagement_map() const;
};

/// Sessionizes every student and derives sequence metrics and the engagement
/// indicator. Students are processed on a bounded worker pool; output order
/// is by student_id.
CohortFeatures compute_features(const EventsByStudent& events, const Manifest& manifest,
                                const Config& config = {});

struct StudentProfile {
  std::string student_id;
  std::optional<StudentMetrics> metrics;
  std::optional<double> engagement;
  std::optional<double> deci;
  std::optional<double> dece;
  std::optional<double> mw_s;
  std::optional<double> mw_d;
  std::optional<double> grade;
};

struct ProfileRequirements {
  bool metrics = false;
  bool engagement = false;
  bool dec = false;
  bool mw = false;
  bool grade = false;

  static ProfileRequirements rq1() { return {false, true, true, true, true}; }
  static ProfileRequirements rq2() { return {true, true, true, false, true}; }
};

struct SourceCount {
  std::string source;
  std::size_t available = 0;
  std::size_t dropped = 0;  // available in this source but excluded from the join
};

struct JoinResult {
  std::vector<StudentProfile> profiles;
  std::vector<SourceCount> attrition;
  std::size_t missing_fields = 0;  // students in every source but lacking a required value
};

/// Inner join by exact student_id over the sources the requirements name.
/// Throws Error when no student survives.
JoinResult join_profiles(std::span<const StudentMetrics> metrics, const std::map<std::string, double>& engagement,
                         const std::map<std::string, ScaleScores>& scales,
                         const std::map<std::string, double>& grades, const ProfileRequirements& req);

/// Keeps the profiles that satisfy `req`.
JoinResult filter_profiles(std::span<const StudentProfile> profiles, const ProfileRequirements& req);

/// student_id,n_jumps,n_responsive,sequential,stickiness,quickness,stableness,n_stops,n_sessions
void write_metrics_csv(std::ostream& out, std::span<const StudentMetrics> metrics);
std::vector<StudentMetrics> read_metrics_csv(std::istream& in);

void write_profiles_csv(std::ostream& out, std::span<const StudentProfile> profiles);
std::vector<StudentProfile> read_profiles_csv(std::istream& in);

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<Correlation>>> cells;  // square, symmetric

  const std::optional<Correlation>& at(const std::string& a, const std::string& b) const;
};

CorrelationMatrix correlation_matrix(const Dataset& data, std::span<const std::string> names);

struct NamedModel {
  std::string name;
  RegressionReport report;
};

struct ModelComparison {
  std::string label;
  FTestResult test;
};

struct Rq1Report {
  std::size_t n = 0;
  CorrelationMatrix correlations;            // DECI, DECE, Engagement, Grade, MW-S, MW-D
  std::vector<NamedModel> engagement_models; // engagement on DEC, then on all four traits
  std::vector<NamedModel> grade_models;      // M1 engagement, M2 + DEC, M3 + interactions
  std::vector<ModelComparison> grade_comparisons;
};

Rq1Report run_rq1(std::span<const StudentProfile> profiles, const Config& config = {});

struct ClusterSummary {
  std::vector<std::string> features;
  std::vector<std::string> student_ids;
  ClusterAssignment assignment;
  std::vector<std::string> display_metrics;   // metrics shown per cluster
  Eigen::MatrixXd display_centroids;          // k x display_metrics, z-normalized
};

struct PredictionCurve {
  int cluster = 0;
  std::vector<double> deci;
  std::vector<Prediction> predictions;
};

struct Rq2Report {
  std::size_t n = 0;
  CorrelationMatrix correlations;               // Engagement, Grade, then the seven metrics
  std::vector<std::string> grade_correlated;    // metrics with p < alpha against grade
  StepwiseResult selection;
  std::vector<NamedModel> selection_models;     // the chosen path, start to final
  std::vector<ModelComparison> selection_comparisons;
  std::optional<ModelComparison> metrics_over_engagement;  // engagement-only vs + selected terms
  NamedModel dec_model;                         // selected terms + DECI + DECE
  ModelComparison dec_added;
  ClusterSummary clusters;
  std::optional<NamedModel> moderation_model;   // Grade ~ C(cluster)*(DECI+DECE) + Engagement*(DECI+DECE)
  std::optional<ModelComparison> deci_block;
  std::optional<ModelComparison> dece_block;
  std::string moderation_diagnostic;            // why the omnibus tests were refused, if they were
  std::vector<PredictionCurve> curves;
};

Rq2Report run_rq2(std::span<const StudentProfile> profiles, std::size_t k, const Config& config = {});

/// Dataset columns: Engagement, Grade, DECI, DECE, MW-S, MW-D and the seven
/// metric names, for whichever values every profile has.
Dataset profiles_dataset(std::span<const StudentProfile> profiles, bool center_dec = false);

}  // namespace readtrace
