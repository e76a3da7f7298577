#pragma once

#include "readtrace/core.hpp"

namespace readtrace {

/// Maps events to O/C/N/P/J/E and interleaves the class symbol (s/m/l) of
/// each inter-event gap; gaps below the short threshold emit nothing. With
/// `append_terminal_gap`, a Timeout session also gets the symbol of its
/// closing gap.
EncodedSequence encode(const Session& session, bool append_terminal_gap = true,
                       const IntervalThresholds& thresholds = {});

/// Replaces every maximal run of two or more adjacent N/P tokens by a single
/// complete jump: X when the run's net displacement is >= 0, Y otherwise.
EncodedSequence collapse_jumps(const EncodedSequence& seq);

}  // namespace readtrace
