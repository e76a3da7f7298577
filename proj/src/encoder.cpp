#include "readtrace/encoder.hpp"

namespace readtrace {

EncodedSequence encode(const Session& session, bool append_terminal_gap,
                       const IntervalThresholds& thresholds) {
  EncodedSequence out;
  out.terminal = session.terminal;
  out.tokens.reserve(session.events.size() * 2 + 1);
  for (std::size_t i = 0; i < session.events.size(); ++i) {
    if (i > 0) {
      Millis gap = session.events[i].timestamp - session.events[i - 1].timestamp;
      if (char c = interval_symbol(classify_interval(gap, thresholds))) out.tokens.push_back(c);
    }
    out.tokens.push_back(event_symbol(session.events[i].kind));
  }
  if (append_terminal_gap && session.terminal.kind == Terminal::Kind::Timeout && !out.tokens.empty()) {
    if (char c = interval_symbol(classify_interval(session.terminal.gap_ms, thresholds)))
      out.tokens.push_back(c);
  }
  return out;
}

EncodedSequence collapse_jumps(const EncodedSequence& seq) {
  EncodedSequence out;
  out.terminal = seq.terminal;
  const std::string& t = seq.tokens;
  out.tokens.reserve(t.size());
  std::size_t i = 0;
  while (i < t.size()) {
    if (t[i] != 'N' && t[i] != 'P') {
      out.tokens.push_back(t[i++]);
      continue;
    }
    std::size_t j = i;
    int net = 0;
    while (j < t.size() && (t[j] == 'N' || t[j] == 'P')) net += t[j++] == 'N' ? 1 : -1;
    if (j - i == 1)
      out.tokens.push_back(t[i]);
    else
      out.tokens.push_back(net >= 0 ? 'X' : 'Y');
    i = j;
  }
  return out;
}

}  // namespace readtrace
