#include "readtrace/core.hpp"

#include <algorithm>
#include <cctype>

namespace readtrace {

EventKind EventKind::other(std::string label) {
  if (label.empty()) throw Error("Other event kind needs a non-empty label");
  return EventKind(EventTag::Other, std::move(label));
}

EventKind EventKind::from_label(std::string_view raw) {
  std::string upper(raw);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "NEXT") return next();
  if (upper == "PREV" || upper == "PREVIOUS") return prev();
  if (upper == "JUMP") return jump();
  if (upper == "OPEN") return open();
  if (upper == "CLOSE") return close();
  return other(std::string(raw));
}

std::string EventKind::to_label() const {
  switch (tag_) {
    case EventTag::Next: return "NEXT";
    case EventTag::Prev: return "PREV";
    case EventTag::Jump: return "JUMP";
    case EventTag::Open: return "OPEN";
    case EventTag::Close: return "CLOSE";
    case EventTag::Other: return label_;
  }
  return label_;
}

void IntervalThresholds::validate() const {
  if (!(0 <= short_min && short_min <= medium_min && medium_min <= long_min))
    throw Error("interval thresholds must satisfy 0 <= short <= medium <= long");
}

IntervalClass classify_interval(Millis delta_ms, const IntervalThresholds& t) {
  if (delta_ms < 0) throw Error("negative interval: " + std::to_string(delta_ms));
  if (delta_ms >= t.long_min) return IntervalClass::Long;
  if (delta_ms >= t.medium_min) return IntervalClass::Medium;
  if (delta_ms >= t.short_min) return IntervalClass::Short;
  return IntervalClass::Suppressed;
}

char interval_symbol(IntervalClass c) {
  switch (c) {
    case IntervalClass::Short: return 's';
    case IntervalClass::Medium: return 'm';
    case IntervalClass::Long: return 'l';
    case IntervalClass::Suppressed: return '\0';
  }
  return '\0';
}

char event_symbol(const EventKind& kind) {
  switch (kind.tag()) {
    case EventTag::Next: return 'N';
    case EventTag::Prev: return 'P';
    case EventTag::Jump: return 'J';
    case EventTag::Open: return 'O';
    case EventTag::Close: return 'C';
    case EventTag::Other: return 'E';
  }
  return 'E';
}

std::string to_string(Terminal t) {
  switch (t.kind) {
    case Terminal::Kind::Closed: return "closed";
    case Terminal::Kind::Timeout: return "timeout:" + std::to_string(t.gap_ms);
    case Terminal::Kind::EndOfStream: return "end";
  }
  return "end";
}

void validate_session(const Session& s, Millis gap_threshold_ms) {
  if (s.events.empty()) throw Error("session has no events");
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const RawEvent& e = s.events[i];
    if (e.student_id != s.student_id || e.material_id != s.material_id)
      throw Error("session mixes students or materials at event " + std::to_string(i));
    if (e.page < 1) throw Error("page must be >= 1");
    if (e.timestamp < 0) throw Error("timestamp must be >= 0");
    if (i > 0) {
      Millis gap = e.timestamp - s.events[i - 1].timestamp;
      if (gap < 0) throw Error("session timestamps decrease at event " + std::to_string(i));
      if (gap >= gap_threshold_ms)
        throw Error("session has an interior gap of " + std::to_string(gap) + " ms");
    }
    if (e.kind.is(EventTag::Close) && i + 1 != s.events.size())
      throw Error("Close event inside a session");
  }
  bool ends_closed = s.events.back().kind.is(EventTag::Close);
  if (ends_closed != (s.terminal.kind == Terminal::Kind::Closed))
    throw Error("terminal marker disagrees with the final event");
  if (s.terminal.kind == Terminal::Kind::Timeout && s.terminal.gap_ms < gap_threshold_ms)
    throw Error("timeout terminal with a gap below the threshold");
}

void validate_sequence(const EncodedSequence& seq) {
  const std::string& t = seq.tokens;
  if (t.empty()) return;
  if (!is_event_symbol(t.front())) throw Error("sequence must start with an event symbol: " + t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!is_event_symbol(t[i]) && !is_interval_symbol(t[i]))
      throw Error(std::string("unknown symbol '") + t[i] + "' in " + t);
    if (i > 0 && is_interval_symbol(t[i]) && is_interval_symbol(t[i - 1]))
      throw Error("adjacent interval symbols in " + t);
  }
}

}  // namespace readtrace
