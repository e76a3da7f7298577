#pragma once

#include <span>
#include <vector>

#include "readtrace/core.hpp"

namespace readtrace {

/// Splits one student's time-ordered events into reading sessions. A new
/// session starts when the material changes, when the gap to the previous
/// event reaches `gap_threshold_ms`, or after a Close event (which stays as
/// the last event of its session).
std::vector<Session> sessionize(std::span<const RawEvent> events,
                                Millis gap_threshold_ms = kDefaultGapThreshold);

}  // namespace readtrace
