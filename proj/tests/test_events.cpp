#include <doctest.h>

#include <random>

#include "evrate/events.hpp"

using namespace evrate;

TEST_CASE("validate_stream keeps a single event and sets duration") {
  const auto s = validate_stream({{5, 0, 0, true}}, 10, 10);
  CHECK(s.size() == 1);
  CHECK(s.duration_us == 6);
  CHECK(s.width == 10);
}

TEST_CASE("validate_stream sorts by timestamp") {
  const auto s = validate_stream({{9, 0, 0, true}, {3, 1, 1, false}}, 4, 4);
  REQUIRE(s.size() == 2);
  CHECK(s.events[0].t == 3);
  CHECK(s.events[1].t == 9);
}

TEST_CASE("validate_stream is a stable sort over equal timestamps") {
  const auto s = validate_stream({{5, 0, 0, true}, {5, 1, 0, false}, {2, 2, 0, true}}, 4, 4);
  CHECK(s.events[1] == Event{5, 0, 0, true});
  CHECK(s.events[2] == Event{5, 1, 0, false});
}

TEST_CASE("validate_stream rejects out-of-range coordinates with the index") {
  try {
    validate_stream({{0, 5, 0, true}}, 4, 4);
    FAIL("expected out_of_range_event");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::out_of_range_event);
    CHECK(e.where() == 0);
  }
  try {
    validate_stream({{0, 0, 0, true}, {-1, 1, 1, false}}, 4, 4);
    FAIL("expected negative_timestamp");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::negative_timestamp);
    CHECK(e.where() == 1);
  }
}

TEST_CASE("empty stream validates to duration 0") {
  const auto s = validate_stream({}, 8, 8);
  CHECK(s.empty());
  CHECK(s.duration_us == 0);
}

TEST_CASE("quantize places a lone event in bin 0") {
  const auto s = validate_stream({{50, 2, 3, true}}, 8, 8);
  const auto g = quantize(s, 100);
  CHECK(g.depth() == 1);
  CHECK(g.value_at(2, 3, 0) == 1);
  CHECK(g.nonzero_count() == 1);
}

TEST_CASE("quantize keeps the last event per bin") {
  const auto s = validate_stream({{10, 1, 1, true}, {90, 1, 1, false}}, 4, 4);
  const auto g = quantize(s, 100);
  CHECK(g.value_at(1, 1, 0) == -1);
}

TEST_CASE("quantize ties at one timestamp resolve to input order") {
  const auto s = validate_stream({{10, 1, 1, false}, {10, 1, 1, true}}, 4, 4);
  CHECK(quantize(s, 100).value_at(1, 1, 0) == 1);
}

TEST_CASE("quantize bins by floor of t over t_quant") {
  const auto s = validate_stream({{250, 0, 0, true}}, 2, 2);
  const auto g = quantize(s, 100);
  CHECK(g.depth() == 3);  // ceil(251 / 100)
  CHECK(g.value_at(0, 0, 2) == 1);
  CHECK(g.value_at(0, 0, 1) == 0);
}

TEST_CASE("quantize honors the roi and shifts coordinates") {
  const auto s = validate_stream({{0, 1, 1, true}, {5, 6, 6, false}}, 8, 8);
  const auto g = quantize(s, 100, Roi{4, 4, 4, 4});
  CHECK(g.width() == 4);
  CHECK(g.value_at(2, 2, 0) == -1);  // (6,6) shifted
  CHECK(g.nonzero_count() == 1);    // (1,1) dropped
}

TEST_CASE("quantize rejects an empty roi and a bad roi") {
  const auto s = validate_stream({{0, 1, 1, true}}, 8, 8);
  CHECK_THROWS_AS(quantize(s, 100, Roi{4, 4, 4, 4}), Error);
  try {
    quantize(s, 100, Roi{4, 4, 8, 8});
    FAIL("roi outside sensor");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_roi);
  }
}

TEST_CASE("quantize of an empty stream throws empty_stream") {
  const auto s = validate_stream({}, 8, 8);
  try {
    quantize(s, 100);
    FAIL("expected empty_stream");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_stream);
  }
}

TEST_CASE("quantize properties on random streams") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coord(0, 15);
  std::uniform_int_distribution<int64_t> time(0, 999);
  std::bernoulli_distribution pol(0.5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Event> events;
    for (int i = 0; i < 200; ++i) {
      events.push_back({time(rng), static_cast<uint16_t>(coord(rng)),
                        static_cast<uint16_t>(coord(rng)), pol(rng)});
    }
    const auto s = validate_stream(events, 16, 16);
    const auto g = quantize(s, 50);

    // nonzero cells never exceed the event count
    CHECK(g.nonzero_count() <= s.size());

    // last-event dominance, checked against a scan over the sorted stream
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        for (const auto& c : g.column(x, y)) {
          int expected = 0;
          for (const auto& e : s.events) {
            if (e.x == x && e.y == y && e.t / 50 == c.bin) expected = e.polarity ? 1 : -1;
          }
          CHECK(c.value == expected);
        }
      }
    }

    // determinism
    const auto g2 = quantize(s, 50);
    CHECK(g2.nonzero_count() == g.nonzero_count());
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        for (int k = 0; k < g.depth(); ++k) CHECK(g.value_at(x, y, k) == g2.value_at(x, y, k));
      }
    }
  }
}

TEST_CASE("quantize equality holds when no two events share a cell") {
  std::vector<Event> events;
  for (int i = 0; i < 16; ++i) {
    events.push_back({i * 100, static_cast<uint16_t>(i % 4), static_cast<uint16_t>(i / 4), true});
  }
  const auto s = validate_stream(events, 4, 4);
  CHECK(quantize(s, 100).nonzero_count() == s.size());
}

TEST_CASE("split_windows produces the anchored partition") {
  const auto s = validate_stream({{0, 0, 0, true}}, 90, 90);
  const auto g = quantize(s, 100);
  const auto areas = split_windows(g, 45);
  REQUIRE(areas.size() == 4);
  CHECK(areas[0].x0 == 0);
  CHECK(areas[1].x0 == 45);
  CHECK(areas[2].y0 == 45);
  CHECK(areas[3].x0 == 45);
  CHECK(areas[3].y0 == 45);
}

TEST_CASE("split_windows drops residual margins") {
  const auto s = validate_stream({{0, 99, 0, true}}, 100, 90);
  const auto areas = split_windows(quantize(s, 100), 45);
  CHECK(areas.size() == 4);
  for (const auto& a : areas) CHECK(a.x0 + a.size <= 90);
}

TEST_CASE("split_windows rejects oversized windows") {
  const auto s = validate_stream({{0, 0, 0, true}}, 44, 44);
  try {
    split_windows(quantize(s, 100), 45);
    FAIL("expected window_too_large");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::window_too_large);
  }
}

TEST_CASE("split_windows areas are disjoint and contained") {
  const auto s = validate_stream({{0, 0, 0, true}}, 97, 61);
  const auto g = quantize(s, 100);
  const auto areas = split_windows(g, 30);
  std::vector<int> covered(static_cast<size_t>(g.width()) * g.height(), 0);
  for (const auto& a : areas) {
    for (int y = a.y0; y < a.y0 + a.size; ++y) {
      for (int x = a.x0; x < a.x0 + a.size; ++x) {
        REQUIRE(x < g.width());
        REQUIRE(y < g.height());
        ++covered[static_cast<size_t>(y) * g.width() + x];
      }
    }
  }
  for (int c : covered) CHECK(c <= 1);
}
