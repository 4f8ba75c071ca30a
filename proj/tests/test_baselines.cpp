#include <doctest.h>

#include <cmath>
#include <random>

#include "evrate/baselines.hpp"
#include "evrate/synth.hpp"
#include "oracles.hpp"

using namespace evrate;

namespace {

EventStream random_stream(std::mt19937& rng, int width, int height, size_t count,
                          int64_t duration) {
  std::uniform_int_distribution<int> xd(0, width - 1), yd(0, height - 1);
  std::uniform_int_distribution<int64_t> td(0, duration - 1);
  std::bernoulli_distribution pd(0.5);
  std::vector<Event> events;
  events.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    events.push_back({td(rng), static_cast<uint16_t>(xd(rng)), static_cast<uint16_t>(yd(rng)),
                      pd(rng)});
  }
  return validate_stream(std::move(events), static_cast<uint16_t>(width),
                         static_cast<uint16_t>(height));
}

}  // namespace

TEST_CASE("simple baseline on a single flashing pixel") {
  std::vector<Event> events;
  for (int64_t t : {0, 500, 1000, 1500}) events.push_back({t, 0, 0, true});
  const auto stream = validate_stream(events, 1, 1);
  const auto est = simple_baseline(stream, 1);
  CHECK(est.rate_hz == doctest::Approx(2000.0));
}

TEST_CASE("a pixel with one event contributes nothing") {
  std::vector<Event> events{{0, 0, 0, true}, {0, 1, 0, true}, {700, 1, 0, true},
                            {1400, 1, 0, true}};
  const auto stream = validate_stream(events, 2, 1);
  // only pixel (1,0) has >= 2 events of one polarity
  const auto est = simple_baseline(stream, 1);
  CHECK(est.rate_hz == doctest::Approx(1e6 / 700.0));
}

TEST_CASE("simple baseline throws no_estimate when nothing repeats") {
  std::vector<Event> events{{0, 0, 0, true}, {100, 1, 1, true}};
  const auto stream = validate_stream(events, 2, 2);
  try {
    simple_baseline(stream, 2);
    FAIL("expected no_estimate");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_estimate);
  }
}

TEST_CASE("simple baseline equals exact ground truth on a clean flash") {
  SynthSpec spec;
  spec.kind = SynthKind::flash;
  spec.rate_hz = 2000;
  spec.duration_us = 50'000;
  spec.width = 16;
  spec.height = 16;
  const auto stream = gen_flash(spec);
  const auto est = simple_baseline(stream, 16);
  CHECK(est.rate_hz == doctest::Approx(2000.0));
}

TEST_CASE("simple baseline matches its brute-force reference exactly") {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 8; ++trial) {
    const auto stream = random_stream(rng, 32, 24, 10'000, 200'000);
    const double brute =
        oracles::simple_baseline_brute_force(stream.events, stream.width, stream.height, 8);
    const auto est = simple_baseline(stream, 8);
    CHECK(est.rate_hz == brute);  // exact, both are medians of the same integers
  }
}

TEST_CASE("fft baseline finds the flash rate on one pixel") {
  // impulses every 500 us observed for one second; the impulse comb sits on
  // the DFT grid for n_fft = 10000, so the fundamental wins the tie
  std::vector<Event> events;
  for (int64_t t = 0; t < 1'000'000; t += 500) events.push_back({t, 0, 0, false});
  const auto stream = validate_stream(events, 1, 1);
  FftBaselineConfig cfg;
  cfg.bin_us = 100;
  cfg.n_fft = 10'000;
  const auto est = fft_baseline(stream, cfg);
  CHECK(std::abs(est.rate_hz - 2000.0) <= est.bin_hz);

  // direct DFT oracle: the winning bin beats its neighborhood
  std::vector<double> signal(10'000, 0.0);
  const size_t n_samples = 10'000;
  for (const auto& e : stream.events) {
    const size_t b = static_cast<size_t>(e.t / 100);
    signal[b] += 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(b) /
                                      static_cast<double>(n_samples - 1));
  }
  const size_t winner = static_cast<size_t>(std::llround(est.rate_hz / est.bin_hz));
  const double mag_winner = oracles::dft_magnitude_at(signal, 10'000, winner);
  for (size_t k = winner - 3; k <= winner + 3; ++k) {
    CHECK(mag_winner >= oracles::dft_magnitude_at(signal, 10'000, k) - 1e-6 * mag_winner);
  }
}

TEST_CASE("zero-event pixels stay out of the rate map and the mode") {
  std::vector<Event> events;
  for (int64_t t = 0; t < 100'000; t += 1000) events.push_back({t, 0, 0, false});
  const auto stream = validate_stream(events, 2, 1);  // pixel (1,0) silent
  const auto est = fft_baseline(stream);
  CHECK(RateMap::has_estimate(est.map.at(0, 0)));
  CHECK(!RateMap::has_estimate(est.map.at(1, 0)));
}

TEST_CASE("mode picks the larger pixel population") {
  // 3 pixels at 1 kHz, 2 pixels at 250 Hz, too far apart for the 3x3 filter
  std::vector<Event> events;
  const std::vector<std::pair<int, int>> fast{{0, 0}, {4, 0}, {8, 0}};
  const std::vector<std::pair<int, int>> slow{{0, 4}, {8, 4}};
  for (auto [x, y] : fast) {
    for (int64_t t = 0; t < 1'000'000; t += 1000) {
      events.push_back({t, static_cast<uint16_t>(x), static_cast<uint16_t>(y), false});
    }
  }
  for (auto [x, y] : slow) {
    for (int64_t t = 0; t < 1'000'000; t += 4000) {
      events.push_back({t, static_cast<uint16_t>(x), static_cast<uint16_t>(y), false});
    }
  }
  const auto stream = validate_stream(events, 9, 5);
  FftBaselineConfig cfg;
  cfg.n_fft = 10'000;  // both combs sit on the DFT grid
  const auto est = fft_baseline(stream, cfg);
  CHECK(std::abs(est.rate_hz - 1000.0) <= est.bin_hz);
}

TEST_CASE("median filter leaves a uniform rate map unchanged") {
  // every pixel carries the same impulse train
  std::vector<Event> events;
  for (int64_t t = 0; t < 200'000; t += 2000) {
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 4; ++x) {
        events.push_back({t, static_cast<uint16_t>(x), static_cast<uint16_t>(y), false});
      }
    }
  }
  const auto stream = validate_stream(events, 4, 4);
  const auto est = fft_baseline(stream);
  const double first = est.map.at(0, 0);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) CHECK(est.map.at(x, y) == first);
  }
  CHECK(est.rate_hz == first);
}

TEST_CASE("fft baseline sees only the selected polarity") {
  // negative events at 1 kHz, positive chatter at 333 Hz
  std::vector<Event> neg_only, both;
  for (int64_t t = 0; t < 500'000; t += 1000) both.push_back({t, 0, 0, false});
  neg_only = both;
  for (int64_t t = 137; t < 500'000; t += 3000) both.push_back({t, 0, 0, true});

  FftBaselineConfig cfg;
  cfg.n_fft = 6000;
  const auto a = fft_baseline(validate_stream(neg_only, 1, 1), cfg);
  const auto b = fft_baseline(validate_stream(both, 1, 1), cfg);
  CHECK(a.rate_hz == b.rate_hz);
  CHECK(a.map.at(0, 0) == b.map.at(0, 0));

  FftBaselineConfig positive = cfg;
  positive.negative_polarity = false;
  const auto c = fft_baseline(validate_stream(both, 1, 1), positive);
  CHECK(std::abs(c.rate_hz - 1e6 / 3000.0) <= c.bin_hz);
}

TEST_CASE("fft baseline validates its flags") {
  std::vector<Event> events{{0, 0, 0, false}, {100, 0, 0, false}};
  const auto stream = validate_stream(events, 1, 1);
  FftBaselineConfig bad;
  bad.n_fft = 1;
  CHECK_THROWS_AS(fft_baseline(stream, bad), Error);
  bad.n_fft = 0;
  bad.bin_us = 0;
  CHECK_THROWS_AS(fft_baseline(stream, bad), Error);
}

TEST_CASE("fft baseline with no events of the polarity throws no_estimate") {
  std::vector<Event> events{{0, 0, 0, true}, {100, 0, 0, true}};
  const auto stream = validate_stream(events, 1, 1);
  try {
    fft_baseline(stream);  // wants negative, stream has only positive
    FAIL("expected no_estimate");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_estimate);
  }
}
