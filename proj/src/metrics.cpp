#include "readtrace/metrics.hpp"

#include <algorithm>
#include <array>

#include "readtrace/encoder.hpp"
#include "readtrace/sessionizer.hpp"

namespace readtrace {

namespace {

long count_of(std::string_view tokens, std::string_view symbols) {
  return static_cast<long>(std::count_if(tokens.begin(), tokens.end(), [&](char c) {
    return symbols.find(c) != std::string_view::npos;
  }));
}

constexpr std::array<std::string_view, 7> kMetricNames = {
    "N_Jumps", "N_Stops", "N_Responsive", "Sequential", "Stickiness", "Quickness", "Stableness"};

}  // namespace

long n_jumps(std::string_view tokens) { return count_of(tokens, "XYJ"); }

long n_responsive(std::string_view tokens) { return count_of(tokens, "E"); }

std::optional<double> sequential(std::string_view tokens) {
  const long nav = count_of(tokens, "NPXYJ");
  if (nav == 0) return std::nullopt;
  return static_cast<double>(count_of(tokens, "NX")) / static_cast<double>(nav);
}

IntervalCensus interval_census(std::string_view tokens) {
  return {count_of(tokens, "s"), count_of(tokens, "m"), count_of(tokens, "l")};
}

std::optional<Predominance> predominance(const IntervalCensus& c) {
  const double s2 = static_cast<double>(c.n_short) * static_cast<double>(c.n_short);
  const double m2 = static_cast<double>(c.n_medium) * static_cast<double>(c.n_medium);
  const double l2 = static_cast<double>(c.n_long) * static_cast<double>(c.n_long);
  const double total = s2 + m2 + l2;
  if (total == 0) return std::nullopt;
  return Predominance{l2 / total, s2 / total, m2 / total};
}

long n_stops(std::span<const Session> sessions) {
  return static_cast<long>(std::count_if(sessions.begin(), sessions.end(), [](const Session& s) {
    return s.terminal.kind == Terminal::Kind::Timeout;
  }));
}

long n_stops(std::span<const EncodedSequence> sequences) {
  return static_cast<long>(std::count_if(sequences.begin(), sequences.end(), [](const EncodedSequence& s) {
    return s.terminal.kind == Terminal::Kind::Timeout;
  }));
}

SessionMetrics session_metrics(const EncodedSequence& collapsed) {
  SessionMetrics m;
  m.n_jumps = n_jumps(collapsed.tokens);
  m.n_responsive = n_responsive(collapsed.tokens);
  m.sequential = sequential(collapsed.tokens);
  if (auto p = predominance(interval_census(collapsed.tokens))) {
    m.stickiness = p->stickiness;
    m.quickness = p->quickness;
    m.stableness = p->stableness;
  }
  return m;
}

std::span<const std::string_view> metric_names() { return kMetricNames; }

std::optional<double> StudentMetrics::get(std::string_view metric) const {
  if (metric == "N_Jumps") return n_jumps;
  if (metric == "N_Stops") return static_cast<double>(n_stops);
  if (metric == "N_Responsive") return n_responsive;
  if (metric == "Sequential") return sequential;
  if (metric == "Stickiness") return stickiness;
  if (metric == "Quickness") return quickness;
  if (metric == "Stableness") return stableness;
  throw Error("unknown sequence metric '" + std::string(metric) + "'");
}

std::optional<StudentMetrics> student_means(std::string student_id,
                                            std::span<const SessionMetrics> sessions, long stops) {
  if (sessions.empty()) return std::nullopt;
  StudentMetrics out;
  out.student_id = std::move(student_id);
  out.n_stops = stops;
  out.n_sessions = static_cast<long>(sessions.size());

  auto mean_of = [&](auto field) -> std::optional<double> {
    double sum = 0;
    long n = 0;
    for (const SessionMetrics& s : sessions)
      if (auto v = field(s)) {
        sum += *v;
        ++n;
      }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  out.n_jumps = *mean_of([](const SessionMetrics& s) { return std::optional<double>(s.n_jumps); });
  out.n_responsive = *mean_of([](const SessionMetrics& s) { return std::optional<double>(s.n_responsive); });
  out.sequential = mean_of([](const SessionMetrics& s) { return s.sequential; });
  out.stickiness = mean_of([](const SessionMetrics& s) { return s.stickiness; });
  out.quickness = mean_of([](const SessionMetrics& s) { return s.quickness; });
  out.stableness = mean_of([](const SessionMetrics& s) { return s.stableness; });
  return out;
}

std::optional<StudentMetrics> metrics_for_student(std::span<const RawEvent> events,
                                                  const SequenceOptions& options) {
  if (events.empty()) return std::nullopt;
  const auto sessions = sessionize(events, options.gap_threshold_ms);
  std::vector<SessionMetrics> per_session;
  per_session.reserve(sessions.size());
  for (const Session& s : sessions)
    per_session.push_back(
        session_metrics(collapse_jumps(encode(s, options.append_terminal_gap, options.intervals))));
  return student_means(events.front().student_id, per_session, n_stops(sessions));
}

}  // namespace readtrace
