#pragma once

// Shared domain model: raw log events, interval classes, sessions and their
// symbol-string encoding.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace readtrace {

using Millis = std::int64_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EventTag { Next, Prev, Jump, Open, Close, Other };

/// Kind of a logged interaction. `Other` keeps the raw platform label
/// (highlights, notes, bookmarks, searches) even though every Other encodes
/// to the same symbol.
class EventKind {
 public:
  EventKind() = default;
  static EventKind next() { return EventKind(EventTag::Next, {}); }
  static EventKind prev() { return EventKind(EventTag::Prev, {}); }
  static EventKind jump() { return EventKind(EventTag::Jump, {}); }
  static EventKind open() { return EventKind(EventTag::Open, {}); }
  static EventKind close() { return EventKind(EventTag::Close, {}); }
  static EventKind other(std::string label);

  /// Maps a raw event-type string; unknown strings become Other(label).
  static EventKind from_label(std::string_view raw);

  EventTag tag() const { return tag_; }
  const std::string& label() const { return label_; }
  bool is(EventTag t) const { return tag_ == t; }

  /// Canonical string written back to logs (NEXT, PREV, ... or the label).
  std::string to_label() const;

  friend bool operator==(const EventKind&, const EventKind&) = default;

 private:
  EventKind(EventTag tag, std::string label) : tag_(tag), label_(std::move(label)) {}
  EventTag tag_ = EventTag::Next;
  std::string label_;
};

struct RawEvent {
  std::string student_id;
  std::string material_id;
  int page = 1;
  EventKind kind;
  Millis timestamp = 0;

  friend bool operator==(const RawEvent&, const RawEvent&) = default;
};

/// Ordered so that a longer gap never maps to a smaller enumerator.
enum class IntervalClass { Suppressed = 0, Short = 1, Medium = 2, Long = 3 };

/// Lower bounds (inclusive) of the short, medium and long classes.
struct IntervalThresholds {
  Millis short_min = 3'000;
  Millis medium_min = 10'000;
  Millis long_min = 120'000;

  void validate() const;
};

inline constexpr Millis kDefaultGapThreshold = 360'000;

IntervalClass classify_interval(Millis delta_ms, const IntervalThresholds& thresholds = {});

/// 's', 'm', 'l' or '\0' for Suppressed.
char interval_symbol(IntervalClass c);

/// O, C, N, P, J or E.
char event_symbol(const EventKind& kind);

struct Terminal {
  enum class Kind { Closed, Timeout, EndOfStream };
  Kind kind = Kind::EndOfStream;
  Millis gap_ms = 0;  // only meaningful for Timeout

  static Terminal closed() { return {Kind::Closed, 0}; }
  static Terminal timeout(Millis gap) { return {Kind::Timeout, gap}; }
  static Terminal end_of_stream() { return {Kind::EndOfStream, 0}; }

  friend bool operator==(const Terminal&, const Terminal&) = default;
};

std::string to_string(Terminal t);

struct Session {
  std::string student_id;
  std::string material_id;
  std::vector<RawEvent> events;
  Terminal terminal;

  Millis start_ms() const { return events.empty() ? 0 : events.front().timestamp; }
  Millis end_ms() const { return events.empty() ? 0 : events.back().timestamp; }
  /// A session holding nothing but a Close event.
  bool is_lone_close() const {
    return events.size() == 1 && events.front().kind.is(EventTag::Close);
  }
};

/// Throws Error describing the first violated invariant.
void validate_session(const Session& s, Millis gap_threshold_ms = kDefaultGapThreshold);

inline bool is_interval_symbol(char c) { return c == 's' || c == 'm' || c == 'l'; }
inline bool is_event_symbol(char c) {
  switch (c) {
    case 'O': case 'C': case 'N': case 'P': case 'J': case 'X': case 'Y': case 'E':
      return true;
    default:
      return false;
  }
}

struct EncodedSequence {
  std::string tokens;
  Terminal terminal;

  friend bool operator==(const EncodedSequence&, const EncodedSequence&) = default;
};

/// Checks the alphabet, the leading event symbol and the no-adjacent-intervals rule.
void validate_sequence(const EncodedSequence& seq);

}  // namespace readtrace
