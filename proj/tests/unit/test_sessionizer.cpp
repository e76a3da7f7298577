#include "doctest.h"

#include <random>

#include "readtrace/sessionizer.hpp"
#include "support.hpp"

using namespace readtrace;
using namespace support;

TEST_CASE("empty input gives no sessions") { CHECK(sessionize(std::vector<RawEvent>{}).empty()); }

TEST_CASE("close terminates a session") {
  std::vector<RawEvent> e = {open(0), next(5'000), close(8'000), open(9'000), next(10'000)};
  const auto s = sessionize(e);
  REQUIRE(s.size() == 2);
  CHECK(s[0].events.size() == 3);
  CHECK(s[0].terminal == Terminal::closed());
  CHECK(s[1].terminal == Terminal::end_of_stream());
  CHECK(s[1].start_ms() == 9'000);
}

TEST_CASE("a gap of exactly the threshold splits, one ms less does not") {
  std::vector<RawEvent> split = {open(0), next(360'000)};
  auto s = sessionize(split);
  REQUIRE(s.size() == 2);
  CHECK(s[0].terminal == Terminal::timeout(360'000));

  std::vector<RawEvent> keep = {open(0), next(359'999)};
  CHECK(sessionize(keep).size() == 1);
}

TEST_CASE("material change splits without a terminal marker") {
  std::vector<RawEvent> e = {open(0), next(1'000), ev(EventKind::open(), 2'000, 1, "M2")};
  const auto s = sessionize(e);
  REQUIRE(s.size() == 2);
  CHECK(s[0].terminal == Terminal::end_of_stream());
  CHECK(s[1].material_id == "M2");
}

TEST_CASE("close takes precedence over a long gap") {
  std::vector<RawEvent> e = {open(0), close(1'000), open(2'000'000)};
  const auto s = sessionize(e);
  REQUIRE(s.size() == 2);
  CHECK(s[0].terminal == Terminal::closed());
}

TEST_CASE("lone close forms its own session") {
  std::vector<RawEvent> e = {open(0), next(1'000), close(500'000)};
  const auto s = sessionize(e);
  REQUIRE(s.size() == 2);
  CHECK(s[0].terminal.kind == Terminal::Kind::Timeout);
  CHECK(s[1].is_lone_close());
  CHECK(s[1].terminal == Terminal::closed());
}

TEST_CASE("session may start with any kind") {
  std::vector<RawEvent> e = {next(0), next(4'000)};
  const auto s = sessionize(e);
  REQUIRE(s.size() == 1);
  CHECK(s[0].events.front().kind == EventKind::next());
}

TEST_CASE("rejects unsorted or mixed input") {
  std::vector<RawEvent> unsorted = {open(5'000), next(1'000)};
  CHECK_THROWS_AS(sessionize(unsorted), Error);
  std::vector<RawEvent> mixed = {open(0), ev(EventKind::next(), 1'000, 1, "M1", "S2")};
  CHECK_THROWS_AS(sessionize(mixed), Error);
}

TEST_CASE("random streams: sessions partition the input and validate") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<Millis> gap(0, 500'000);
  std::uniform_int_distribution<int> mat(0, 2);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<RawEvent> e;
    Millis t = 0;
    for (int i = 0; i < 60; ++i) {
      t += gap(rng) / (1 + kind(rng));
      const EventKind kinds[] = {EventKind::open(), EventKind::next(), EventKind::prev(),
                                 EventKind::jump(), EventKind::close(), EventKind::other("MEMO")};
      e.push_back(ev(kinds[kind(rng)], t, 1, "M" + std::to_string(mat(rng))));
    }
    const auto s = sessionize(e);
    std::size_t total = 0;
    for (const auto& session : s) {
      CHECK_NOTHROW(validate_session(session));
      for (const auto& x : session.events) CHECK(x == e[total++]);
    }
    CHECK(total == e.size());
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const bool closed = s[i].events.back().kind.is(EventTag::Close);
      const Millis g = s[i + 1].start_ms() - s[i].end_ms();
      CHECK((closed || g >= kDefaultGapThreshold || s[i].material_id != s[i + 1].material_id));
    }
  }
}

TEST_CASE("translating timestamps leaves the partition unchanged") {
  std::vector<RawEvent> e = {open(0), next(5'000), close(8'000), open(900'000), next(1'400'000)};
  auto shifted = e;
  for (auto& x : shifted) x.timestamp += 123'456'789;
  const auto a = sessionize(e);
  const auto b = sessionize(shifted);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].events.size() == b[i].events.size());
    CHECK(a[i].terminal == b[i].terminal);
  }
}
