#include "readtrace/sessionizer.hpp"

namespace readtrace {

std::vector<Session> sessionize(std::span<const RawEvent> events, Millis gap_threshold_ms) {
  std::vector<Session> sessions;
  if (events.empty()) return sessions;
  if (gap_threshold_ms <= 0) throw Error("gap threshold must be positive");

  const std::string& student = events.front().student_id;
  Session current;
  auto open_session = [&](const RawEvent& e) {
    current = Session{e.student_id, e.material_id, {}, Terminal::end_of_stream()};
  };

  open_session(events.front());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const RawEvent& e = events[i];
    if (e.student_id != student) throw Error("sessionize expects the events of a single student");
    if (i > 0) {
      const RawEvent& prev = events[i - 1];
      const Millis gap = e.timestamp - prev.timestamp;
      if (gap < 0) throw Error("sessionize expects events sorted by timestamp");
      bool split = false;
      if (prev.kind.is(EventTag::Close)) {
        current.terminal = Terminal::closed();
        split = true;
      } else if (gap >= gap_threshold_ms) {
        current.terminal = Terminal::timeout(gap);
        split = true;
      } else if (e.material_id != prev.material_id) {
        split = true;
      }
      if (split) {
        sessions.push_back(std::move(current));
        open_session(e);
      }
    }
    current.events.push_back(e);
  }
  if (current.events.back().kind.is(EventTag::Close)) current.terminal = Terminal::closed();
  sessions.push_back(std::move(current));
  return sessions;
}

}  // namespace readtrace
