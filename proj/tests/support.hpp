#pragma once

#include <string>
#include <vector>

#include "readtrace/core.hpp"

namespace support {

inline readtrace::RawEvent ev(readtrace::EventKind kind, readtrace::Millis t, int page = 1,
                              std::string material = "M1", std::string student = "S1") {
  return {std::move(student), std::move(material), page, std::move(kind), t};
}

inline readtrace::RawEvent open(readtrace::Millis t, std::string material = "M1") {
  return ev(readtrace::EventKind::open(), t, 1, std::move(material));
}
inline readtrace::RawEvent next(readtrace::Millis t, int page = 1) { return ev(readtrace::EventKind::next(), t, page); }
inline readtrace::RawEvent prev(readtrace::Millis t, int page = 1) { return ev(readtrace::EventKind::prev(), t, page); }
inline readtrace::RawEvent jump(readtrace::Millis t, int page = 1) { return ev(readtrace::EventKind::jump(), t, page); }
inline readtrace::RawEvent close(readtrace::Millis t) { return ev(readtrace::EventKind::close(), t); }
inline readtrace::RawEvent marker(readtrace::Millis t, int page = 1) {
  return ev(readtrace::EventKind::other("ADD_MARKER"), t, page);
}

}  // namespace support
