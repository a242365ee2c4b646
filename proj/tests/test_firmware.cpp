#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "gripsim/firmware.hpp"

using namespace gripsim::firmware;

namespace {

FirmwareConfig cfg_with(int debounce, int actuation) {
  FirmwareConfig c;
  c.debounce_ticks = debounce;
  c.actuation_ticks = actuation;
  return c;
}

struct Run {
  std::vector<FirmwareState> states;
  std::vector<PinLevels> pins;
};

Run run(const std::vector<std::pair<bool, bool>>& raw, const FirmwareConfig& cfg,
        FirmwareState s = {}) {
  Run r;
  for (std::size_t t = 0; t < raw.size(); ++t) {
    auto [next, pins] = firmware_tick(s, {raw[t].first, raw[t].second, static_cast<std::int64_t>(t)}, cfg);
    s = next;
    r.states.push_back(s);
    r.pins.push_back(pins);
  }
  return r;
}

FirmwareState settled(bool open, bool close, int debounce) {
  FirmwareState s;
  s.open = {debounce, open, open};
  s.close = {debounce, close, close};
  return s;
}

}  // namespace

TEST_CASE("debounce: alternating input never settles") {
  const FirmwareConfig cfg = cfg_with(3, 100);
  FirmwareState s;
  for (int t = 0; t < 50; ++t) {
    s = debounce_update(s, {t % 2 == 0, false, t}, cfg);
    CHECK_FALSE(s.stable_open());
  }
}

TEST_CASE("debounce: constant press flips on the third tick") {
  const FirmwareConfig cfg = cfg_with(3, 100);
  FirmwareState s;
  s = debounce_update(s, {true, false, 0}, cfg);
  CHECK_FALSE(s.stable_open());
  s = debounce_update(s, {true, false, 1}, cfg);
  CHECK_FALSE(s.stable_open());
  s = debounce_update(s, {true, false, 2}, cfg);
  CHECK(s.stable_open());
}

TEST_CASE("debounce: steady input keeps state with a saturated counter") {
  const FirmwareConfig cfg = cfg_with(3, 100);
  FirmwareState s = settled(true, false, 3);
  for (int t = 0; t < 10; ++t) {
    s = debounce_update(s, {true, false, t}, cfg);
    CHECK(s.stable_open());
    CHECK(s.open.count == 3);
  }
}

TEST_CASE("resolve_command mapping") {
  CHECK(resolve_command(false, false) == Command::None);
  CHECK(resolve_command(true, false) == Command::Open);
  CHECK(resolve_command(false, true) == Command::Close);
  CHECK(resolve_command(true, true) == Command::Interlock);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(FirmwareConfig{}.validate());
  CHECK_THROWS_AS(cfg_with(0, 100).validate(), std::invalid_argument);
  CHECK_THROWS_AS(cfg_with(3, 0).validate(), std::invalid_argument);
  FirmwareConfig c;
  c.tick_period_us = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("idle with no input stays idle") {
  auto [s, pins] = firmware_tick({}, {false, false, 0}, FirmwareConfig{});
  CHECK(s.mode == Mode::Idle);
  CHECK(pins == PinLevels{});
}

// Closed form for "open held for H ticks from tick 0, then released":
// rb0 is high on [D-1, D-1 + A*ceil(H/A)).
TEST_CASE("held open drives in re-armed pulses (closed-form reference)") {
  const int D = 20, A = 100;
  const FirmwareConfig cfg = cfg_with(D, A);
  for (int hold : {1, 20, 99, 100, 101, 250, 400}) {
    std::vector<std::pair<bool, bool>> raw(900, {false, false});
    for (int t = 0; t < hold; ++t) raw[t].first = true;
    const Run r = run(raw, cfg);

    // A press shorter than the debounce window never registers.
    const int begin = hold >= D ? D - 1 : -1;
    const int end = hold >= D ? D - 1 + A * ((hold + A - 1) / A) : -1;
    for (int t = 0; t < 900; ++t) {
      const bool expect = begin >= 0 && t >= begin && t < end;
      INFO("hold=" << hold << " t=" << t);
      REQUIRE(r.pins[t].rb0_out == expect);
      REQUIRE_FALSE(r.pins[t].rb1_out);
      REQUIRE((r.states[t].mode == Mode::Opening) == expect);
    }
  }
}

TEST_CASE("pulse of exactly actuation_ticks for a press of exactly debounce_ticks") {
  for (auto [D, A] : {std::pair{20, 100}, std::pair{3, 7}, std::pair{5, 5}, std::pair{1, 1}}) {
    const FirmwareConfig cfg = cfg_with(D, A);
    std::vector<std::pair<bool, bool>> raw(300, {false, false});
    for (int t = 10; t < 10 + D; ++t) raw[t].second = true;
    const Run r = run(raw, cfg);
    int high = 0;
    for (const PinLevels& p : r.pins) high += p.rb1_out;
    CHECK(high == A);
  }
}

TEST_CASE("close pressed while opening forces interlock on the same tick") {
  const FirmwareConfig cfg = cfg_with(1, 100);
  FirmwareState s = settled(true, false, 1);
  s.mode = Mode::Opening;
  s.remaining_ticks = 50;
  auto [next, pins] = firmware_tick(s, {true, true, 0}, cfg);
  CHECK(next.mode == Mode::Interlock);
  CHECK(next.remaining_ticks == 0);
  CHECK_FALSE(pins.rb0_out);
  CHECK_FALSE(pins.rb1_out);
}

TEST_CASE("interlock clears only after both switches release") {
  const FirmwareConfig cfg = cfg_with(1, 10);
  std::vector<std::pair<bool, bool>> raw = {{true, true}, {true, false}, {false, true},
                                            {false, false}, {true, false}};
  const Run r = run(raw, cfg);
  CHECK(r.states[0].mode == Mode::Interlock);
  CHECK(r.states[1].mode == Mode::Interlock);
  CHECK(r.states[2].mode == Mode::Interlock);
  CHECK(r.states[3].mode == Mode::Idle);
  CHECK(r.states[4].mode == Mode::Opening);
}

TEST_CASE("reversal stops for a tick before driving the other way") {
  const FirmwareConfig cfg = cfg_with(1, 50);
  std::vector<std::pair<bool, bool>> raw = {{true, false}, {true, false}, {false, true}, {false, true}};
  const Run r = run(raw, cfg);
  CHECK(r.states[1].mode == Mode::Opening);
  CHECK(r.states[2].mode == Mode::Idle);
  CHECK(r.states[3].mode == Mode::Closing);
}

TEST_CASE("property: pins never (1,1) and mode/pin invariant holds over 10^6 chattering ticks") {
  std::mt19937_64 rng(12345);
  const FirmwareConfig cfg = cfg_with(4, 9);
  FirmwareState s;
  bool open = false, close = false;
  for (std::int64_t t = 0; t < 1'000'000; ++t) {
    // Mix of long holds and dense chatter.
    const auto r = rng();
    const unsigned p = (r >> 40) % 100;
    if (p < 12) open = !open;
    if (p >= 12 && p < 24) close = !close;
    const bool raw_open = (r & 0xff) < 10 ? !open : open;
    const bool raw_close = ((r >> 8) & 0xff) < 10 ? !close : close;
    auto [next, pins] = firmware_tick(s, {raw_open, raw_close, t}, cfg);
    s = next;
    REQUIRE_FALSE((pins.rb0_out && pins.rb1_out));
    REQUIRE(pins.rb0_out == (s.mode == Mode::Opening));
    REQUIRE(pins.rb1_out == (s.mode == Mode::Closing));
    if (s.mode == Mode::Idle || s.mode == Mode::Interlock) REQUIRE(s.remaining_ticks == 0);
    else REQUIRE(s.remaining_ticks >= 1);
    if (resolve_command(s.stable_open(), s.stable_close()) == Command::Interlock)
      REQUIRE(s.mode == Mode::Interlock);
  }
}

TEST_CASE("firmware_tick is a pure function") {
  std::mt19937_64 rng(7);
  const FirmwareConfig cfg = cfg_with(3, 5);
  FirmwareState s;
  for (int t = 0; t < 10000; ++t) {
    const SwitchFrame f{(rng() & 3) == 0, (rng() & 7) == 0, t};
    const auto a = firmware_tick(s, f, cfg);
    const auto b = firmware_tick(s, f, cfg);
    REQUIRE(a.first == b.first);
    REQUIRE(a.second == b.second);
    s = a.first;
  }
}
