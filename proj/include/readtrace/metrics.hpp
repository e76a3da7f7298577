#pragma once

// Per-session sequence metrics (jumps, stops, responsive events, sequential
// navigation and interval predominance) and their per-student averages.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "readtrace/core.hpp"

namespace readtrace {

struct IntervalCensus {
  long n_short = 0;
  long n_medium = 0;
  long n_long = 0;

  long total() const { return n_short + n_medium + n_long; }
  friend bool operator==(const IntervalCensus&, const IntervalCensus&) = default;
};

/// Squared-count shares of long, short and medium intervals.
struct Predominance {
  double stickiness = 0;
  double quickness = 0;
  double stableness = 0;
};

/// X + Y + J tokens; expects a collapsed sequence.
long n_jumps(std::string_view tokens);
/// E tokens.
long n_responsive(std::string_view tokens);
/// (#N + #X) / #{N,P,X,Y,J}; nullopt without navigation tokens.
std::optional<double> sequential(std::string_view tokens);
IntervalCensus interval_census(std::string_view tokens);
/// nullopt when the census is empty.
std::optional<Predominance> predominance(const IntervalCensus& census);

/// Sessions that ended by timeout.
long n_stops(std::span<const Session> sessions);
long n_stops(std::span<const EncodedSequence> sequences);

struct SessionMetrics {
  long n_jumps = 0;
  long n_responsive = 0;
  std::optional<double> sequential;
  std::optional<double> stickiness;
  std::optional<double> quickness;
  std::optional<double> stableness;
};

SessionMetrics session_metrics(const EncodedSequence& collapsed);

struct StudentMetrics {
  std::string student_id;
  double n_jumps = 0;
  double n_responsive = 0;
  std::optional<double> sequential;
  std::optional<double> stickiness;
  std::optional<double> quickness;
  std::optional<double> stableness;
  long n_stops = 0;
  long n_sessions = 0;

  /// Value by metric name (N_Jumps, N_Stops, N_Responsive, Sequential,
  /// Stickiness, Quickness, Stableness); throws on an unknown name.
  std::optional<double> get(std::string_view metric) const;
};

/// The seven metric names in table order.
std::span<const std::string_view> metric_names();

/// Means over sessions where each metric is defined; n_stops passes through.
/// nullopt for a student without sessions.
std::optional<StudentMetrics> student_means(std::string student_id,
                                            std::span<const SessionMetrics> sessions, long n_stops);

struct SequenceOptions {
  Millis gap_threshold_ms = kDefaultGapThreshold;
  IntervalThresholds intervals;
  bool append_terminal_gap = true;
};

/// Sessionize, encode, collapse and average for one student's events.
std::optional<StudentMetrics> metrics_for_student(std::span<const RawEvent> events,
                                                  const SequenceOptions& options = {});

}  // namespace readtrace
