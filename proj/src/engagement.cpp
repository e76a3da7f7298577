#include "readtrace/engagement.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>

namespace readtrace {

namespace {

constexpr Millis kDayMs = 86'400'000;

bool label_matches(const std::string& label, const std::vector<std::string>& needles) {
  auto upper = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
  };
  const std::string hay = upper(label);
  return std::any_of(needles.begin(), needles.end(), [&](const std::string& n) {
    return !n.empty() && hay.find(upper(n)) != std::string::npos;
  });
}

Millis floor_div(Millis a, Millis b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

struct Tally {
  double events = 0;
  double time_ms = 0;
  double dwell = 0;
  double highlights = 0;
  double notes = 0;
  std::set<Millis> days;
};

}  // namespace

std::string_view sub_metric_name(SubMetric m) {
  switch (m) {
    case SubMetric::EventsMaterial: return "events_material";
    case SubMetric::TimeMaterial: return "time_material";
    case SubMetric::DaysMaterial: return "days_material";
    case SubMetric::DwellMaterial: return "dwell_material";
    case SubMetric::HighlightsMaterial: return "highlights_material";
    case SubMetric::NotesMaterial: return "notes_material";
    case SubMetric::EventsPage: return "events_page";
    case SubMetric::TimePage: return "time_page";
    case SubMetric::DaysPage: return "days_page";
    case SubMetric::DwellPage: return "dwell_page";
    case SubMetric::HighlightsPage: return "highlights_page";
    case SubMetric::NotesPage: return "notes_page";
    case SubMetric::Completion: return "completion";
  }
  return "unknown";
}

SubMetricResult compute_submetrics(std::span<const Session> sessions, const Manifest& manifest,
                                   const EngagementOptions& options) {
  SubMetricResult out;
  EngagementSubMetrics& m = out.metrics;
  if (!sessions.empty()) m.student_id = sessions.front().student_id;

  Tally total;
  std::map<std::pair<std::string, int>, Tally> pages;
  std::map<std::string, std::set<int>> visited;

  for (const Session& s : sessions) {
    for (std::size_t i = 0; i < s.events.size(); ++i) {
      const RawEvent& e = s.events[i];
      Tally& page = pages[{e.material_id, e.page}];
      visited[e.material_id].insert(e.page);
      const Millis day = floor_div(e.timestamp + options.utc_offset_ms, kDayMs);
      for (Tally* t : {&total, &page}) {
        t->events += 1;
        t->days.insert(day);
        if (e.kind.is(EventTag::Other)) {
          if (label_matches(e.kind.label(), options.highlight_labels)) t->highlights += 1;
          if (label_matches(e.kind.label(), options.note_labels)) t->notes += 1;
        }
      }
      if (i + 1 < s.events.size()) {
        const Millis gap = s.events[i + 1].timestamp - e.timestamp;
        for (Tally* t : {&total, &page}) {
          t->time_ms += static_cast<double>(gap);
          if (gap >= options.dwell_threshold_ms) t->dwell += 1;
        }
      }
    }
  }

  m[SubMetric::EventsMaterial] = total.events;
  m[SubMetric::TimeMaterial] = total.time_ms;
  m[SubMetric::DaysMaterial] = static_cast<double>(total.days.size());
  m[SubMetric::DwellMaterial] = total.dwell;
  m[SubMetric::HighlightsMaterial] = total.highlights;
  m[SubMetric::NotesMaterial] = total.notes;

  if (!pages.empty()) {
    const double n = static_cast<double>(pages.size());
    for (const auto& [key, t] : pages) {
      m[SubMetric::EventsPage] += t.events / n;
      m[SubMetric::TimePage] += t.time_ms / n;
      m[SubMetric::DaysPage] += static_cast<double>(t.days.size()) / n;
      m[SubMetric::DwellPage] += t.dwell / n;
      m[SubMetric::HighlightsPage] += t.highlights / n;
      m[SubMetric::NotesPage] += t.notes / n;
    }
  }

  double completion_sum = 0;
  int completion_n = 0;
  for (const auto& [material, seen] : visited) {
    auto it = manifest.find(material);
    if (it == manifest.end()) {
      out.warnings.push_back("material " + material + " missing from manifest; completion skipped");
      continue;
    }
    // Pages beyond the manifest's count are clamped rather than pushing completion above 1.
    const auto in_range = std::count_if(seen.begin(), seen.end(), [&](int p) { return p <= it->second; });
    completion_sum += static_cast<double>(in_range) / static_cast<double>(it->second);
    ++completion_n;
  }
  m[SubMetric::Completion] = completion_n > 0 ? completion_sum / completion_n : 0.0;
  return out;
}

std::vector<double> percentile_rank(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 tie; their 1-based mid-rank is (i + 1 + j) / 2.
    const double mid = (static_cast<double>(i) + 1.0 + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mid / static_cast<double>(n);
    i = j;
  }
  return ranks;
}

EngagementResult engagement_score(std::span<const EngagementSubMetrics> cohort) {
  EngagementResult out;
  if (cohort.empty()) throw Error("engagement score needs at least one student");
  if (cohort.size() == 1)
    out.warnings.push_back("single-student cohort: every percentile rank is 1");

  out.scores.resize(cohort.size());
  for (std::size_t s = 0; s < cohort.size(); ++s) out.scores[s].student_id = cohort[s].student_id;

  std::vector<double> column(cohort.size());
  for (std::size_t k = 0; k < kNumSubMetrics; ++k) {
    for (std::size_t s = 0; s < cohort.size(); ++s) column[s] = cohort[s].values[k];
    const auto ranks = percentile_rank(column);
    for (std::size_t s = 0; s < cohort.size(); ++s) out.scores[s].ranks[k] = ranks[s];
  }
  for (auto& sc : out.scores)
    sc.score = std::accumulate(sc.ranks.begin(), sc.ranks.end(), 0.0) / static_cast<double>(kNumSubMetrics);
  return out;
}

}  // namespace readtrace
