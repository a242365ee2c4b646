#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

namespace gripsim::firmware {

/// Raw switch sample at one firmware tick.
struct SwitchFrame {
  bool open_pressed = false;
  bool close_pressed = false;
  std::int64_t tick = 0;
};

/// Pin map: RA3 <- open switch, RA4 <- close switch; RB0 drives open, RB1 drives close.
struct PinLevels {
  bool ra3_in = false;
  bool ra4_in = false;
  bool rb0_out = false;
  bool rb1_out = false;

  friend bool operator==(const PinLevels&, const PinLevels&) = default;
};

struct FirmwareConfig {
  std::int64_t tick_period_us = 1000;
  int debounce_ticks = 20;
  int actuation_ticks = 100;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

enum class Mode { Idle, Opening, Closing, Interlock };
enum class Command { None, Open, Close, Interlock };

std::string_view to_string(Mode m);
std::string_view to_string(Command c);

/// Run-length debouncer for one input line.
struct Debounce {
  int count = 0;       // consecutive ticks at `last_raw`, saturating
  bool last_raw = false;
  bool stable = false;

  friend bool operator==(const Debounce&, const Debounce&) = default;
};

struct FirmwareState {
  Mode mode = Mode::Idle;
  int remaining_ticks = 0;
  Debounce open;
  Debounce close;

  bool stable_open() const { return open.stable; }
  bool stable_close() const { return close.stable; }

  friend bool operator==(const FirmwareState&, const FirmwareState&) = default;
};

/// Advances both debouncers by one raw sample. A stable level flips only
/// after the raw level has held for `debounce_ticks` consecutive ticks.
FirmwareState debounce_update(FirmwareState state, const SwitchFrame& raw,
                              const FirmwareConfig& cfg);

Command resolve_command(bool stable_open, bool stable_close);

/// Output pins implied by a mode (inputs left false).
PinLevels outputs_for(Mode m);

/// One pass of the controller loop: read, debounce, resolve, timed drive.
std::pair<FirmwareState, PinLevels> firmware_tick(FirmwareState state,
                                                  const SwitchFrame& raw,
                                                  const FirmwareConfig& cfg);

}  // namespace gripsim::firmware
