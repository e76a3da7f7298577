#pragma once

// Engagement indicator: reading-activity sub-metrics at material and page
// level, percentile-ranked across the cohort and averaged into [0,1].

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "readtrace/core.hpp"
#include "readtrace/ingest.hpp"

namespace readtrace {

struct EngagementOptions {
  /// Case-insensitive substrings of Other labels counted as highlights / notes.
  std::vector<std::string> highlight_labels{"MARKER"};
  std::vector<std::string> note_labels{"MEMO"};
  /// Offset added to timestamps before taking the calendar day.
  Millis utc_offset_ms = 0;
  Millis dwell_threshold_ms = 3'000;
};

enum class SubMetric : std::size_t {
  EventsMaterial,
  TimeMaterial,
  DaysMaterial,
  DwellMaterial,
  HighlightsMaterial,
  NotesMaterial,
  EventsPage,
  TimePage,
  DaysPage,
  DwellPage,
  HighlightsPage,
  NotesPage,
  Completion,
};

inline constexpr std::size_t kNumSubMetrics = 13;

std::string_view sub_metric_name(SubMetric m);

struct EngagementSubMetrics {
  std::string student_id;
  std::array<double, kNumSubMetrics> values{};

  double& operator[](SubMetric m) { return values[static_cast<std::size_t>(m)]; }
  double operator[](SubMetric m) const { return values[static_cast<std::size_t>(m)]; }

  // Material-level totals, exposed under their plain names.
  double total_events() const { return (*this)[SubMetric::EventsMaterial]; }
  double time_spent_ms() const { return (*this)[SubMetric::TimeMaterial]; }
  double reading_days() const { return (*this)[SubMetric::DaysMaterial]; }
  double events_ge_3s() const { return (*this)[SubMetric::DwellMaterial]; }
  double highlights() const { return (*this)[SubMetric::HighlightsMaterial]; }
  double notes() const { return (*this)[SubMetric::NotesMaterial]; }
  double completion() const { return (*this)[SubMetric::Completion]; }
};

struct SubMetricResult {
  EngagementSubMetrics metrics;
  std::vector<std::string> warnings;
};

/// Sub-metrics of one student's sessions. Time spent and dwell events only use
/// gaps inside a session.
SubMetricResult compute_submetrics(std::span<const Session> sessions, const Manifest& manifest,
                                   const EngagementOptions& options = {});

/// Mid-rank percentile: (#{v < x} + (#{v == x} + 1) / 2) / n, in (0,1].
std::vector<double> percentile_rank(std::span<const double> values);

struct EngagementScore {
  std::string student_id;
  double score = 0;
  std::array<double, kNumSubMetrics> ranks{};
};

struct EngagementResult {
  std::vector<EngagementScore> scores;  // same order as the input
  std::vector<std::string> warnings;
};

/// Unweighted mean of the percentile ranks of every sub-metric.
EngagementResult engagement_score(std::span<const EngagementSubMetrics> cohort);

}  // namespace readtrace
