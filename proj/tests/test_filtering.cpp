#include <vector>

#include "dart/filtering.hpp"
#include "dart/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace dart;

namespace {

EventStream random_stream(uint64_t seed, uint16_t side, int n, uint64_t max_gap) {
  Rng rng(seed);
  EventStream s;
  s.width = s.height = side;
  uint64_t t = 0;
  for (int i = 0; i < n; ++i) {
    t += rng.below(max_gap);
    s.events.push_back(Event{static_cast<uint16_t>(rng.below(side)),
                             static_cast<uint16_t>(rng.below(side)), t,
                             static_cast<uint8_t>(rng.below(2))});
  }
  return s;
}

std::vector<Event> run_refractory(const std::vector<Event>& events, uint16_t side,
                                  uint64_t theta) {
  RefractoryFilter f(side, side, theta);
  std::vector<Event> kept;
  for (const Event& e : events)
    if (f.pass(e)) kept.push_back(e);
  return kept;
}

std::vector<Event> run_noise(const std::vector<Event>& events, uint16_t side,
                             uint64_t theta) {
  NoiseFilter f(side, side, theta);
  std::vector<Event> kept;
  for (const Event& e : events)
    if (f.pass(e)) kept.push_back(e);
  return kept;
}

}  // namespace

TEST_CASE("refractory filter: strict gap rule on one pixel") {
  RefractoryFilter f(8, 8, 1000);
  CHECK(f.pass(Event{3, 3, 100, 0}));         // first event at the pixel
  CHECK(!f.pass(Event{3, 3, 600, 0}));        // gap 500 <= 1000
  CHECK(!f.pass(Event{3, 3, 1100, 0}));       // gap 1000 from the last pass
  CHECK(f.pass(Event{3, 3, 1101, 0}));        // gap 1001 > 1000
  CHECK(f.pass(Event{4, 3, 1101, 0}));        // other pixels are independent
}

TEST_CASE("refractory filter rejects out-of-order input") {
  RefractoryFilter f(8, 8, 1000);
  CHECK(f.pass(Event{0, 0, 500, 0}));
  CHECK_THROWS_AS(f.pass(Event{1, 1, 499, 0}), OrderViolation);
}

TEST_CASE("noise filter: a supported event passes, an isolated one does not") {
  NoiseFilter f(8, 8, 5000);
  CHECK(!f.pass(Event{3, 3, 0, 0}));      // no neighbor history
  CHECK(f.pass(Event{4, 4, 100, 0}));     // diagonal neighbor 100us earlier
  CHECK(!f.pass(Event{6, 6, 200, 0}));    // nothing adjacent
}

TEST_CASE("noise filter: support is strict and excludes the center pixel") {
  NoiseFilter f(8, 8, 5000);
  CHECK(!f.pass(Event{3, 3, 0, 0}));
  // Same pixel only: the center is excluded from its own neighborhood.
  CHECK(!f.pass(Event{3, 3, 100, 0}));
  // Exactly theta_noise later is not support (strict <)...
  CHECK(!f.pass(Event{2, 3, 5100, 0}));
  // ...but the failed event above was still recorded, and supports this one.
  CHECK(f.pass(Event{2, 4, 5101, 0}));
}

TEST_CASE("cascade: the noise stage sees only refractory survivors") {
  // Pixel (3,3) fires at 0 (passes) and 500 (refractory-dropped). Pixel (3,4)
  // fires at 5400: against survivor history {0} the gap is 5400 (no support),
  // against presented history {0,500} it would be 4900 (support). The cascade
  // must drop it.
  EventStream s;
  s.width = s.height = 8;
  s.events = {Event{3, 3, 0, 0}, Event{3, 3, 500, 0}, Event{3, 4, 5400, 0}};
  const EventStream out = cascade(s, 5000, 1000);
  CHECK(out.events.empty());
}

TEST_CASE("cascade: empty input stays empty") {
  EventStream s;
  s.width = s.height = 8;
  CHECK(cascade(s, 5000, 1000).events.empty());
}

TEST_CASE("cascade: degenerate thresholds keep any supported event") {
  // theta_ref = 0 disables the refractory stage (any positive gap passes);
  // a huge theta_noise keeps every event with any earlier neighbor.
  EventStream s;
  s.width = s.height = 8;
  s.events = {Event{3, 3, 0, 0}, Event{4, 3, 1, 0}, Event{4, 4, 2, 0}};
  const EventStream out = cascade(s, ~0ULL, 0);
  REQUIRE(out.events.size() == 2);
  CHECK(out.events[0].t == 1);
  CHECK(out.events[1].t == 2);
}

TEST_CASE("single filters match the quadratic history-scan oracles") {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    const EventStream s = random_stream(seed * 31 + 1, 8, 50, 900);
    CHECK(run_refractory(s.events, 8, 1000) ==
          oracle::refractory_oracle(s.events, 1000));
    CHECK(run_noise(s.events, 8, 5000) == oracle::noise_oracle(s.events, 5000));
  }
}

TEST_CASE("cascade matches the composed oracle on random streams") {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    const EventStream s = random_stream(seed * 17 + 3, 8, 60, 700);
    const EventStream got = cascade(s, 5000, 1000);
    CHECK(got.events == oracle::cascade_oracle(s.events, 5000, 1000));
  }
}

TEST_CASE("cascade output is a subsequence of its input") {
  const EventStream s = random_stream(501, 12, 300, 400);
  const EventStream out = cascade(s, 4000, 800);
  size_t j = 0;
  for (const Event& e : s.events) {
    if (j < out.events.size() && out.events[j] == e) ++j;
  }
  CHECK(j == out.events.size());
}

TEST_CASE("refractory stage is idempotent on its own output") {
  const EventStream s = random_stream(77, 8, 200, 600);
  const std::vector<Event> once = run_refractory(s.events, 8, 1000);
  CHECK(run_refractory(once, 8, 1000) == once);
}

TEST_CASE("raising theta_noise never shrinks the kept set") {
  const EventStream s = random_stream(88, 8, 200, 2000);
  const std::vector<Event> tight = run_noise(s.events, 8, 2000);
  const std::vector<Event> loose = run_noise(s.events, 8, 6000);
  // Every tightly-kept event must also be loosely kept (set inclusion).
  size_t j = 0;
  for (const Event& e : loose.size() >= tight.size() ? loose : tight) {
    if (j < tight.size() && tight[j] == e) ++j;
  }
  CHECK(j == tight.size());
}

TEST_CASE("raising theta_ref never grows the kept count") {
  const EventStream s = random_stream(89, 8, 300, 500);
  size_t prev = run_refractory(s.events, 8, 0).size();
  for (uint64_t theta : {200ULL, 500ULL, 1000ULL, 3000ULL}) {
    const size_t now = run_refractory(s.events, 8, theta).size();
    CHECK(now <= prev);
    prev = now;
  }
}
