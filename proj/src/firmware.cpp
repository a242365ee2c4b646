#include "gripsim/firmware.hpp"

#include <algorithm>
#include <stdexcept>

#include "gripsim/errors.hpp"

namespace gripsim::firmware {

void FirmwareConfig::validate() const {
  if (tick_period_us <= 0) throw std::invalid_argument("tick_period_us must be > 0");
  if (debounce_ticks < 1) throw std::invalid_argument("debounce_ticks must be >= 1");
  if (actuation_ticks < 1) throw std::invalid_argument("actuation_ticks must be >= 1");
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Idle: return "Idle";
    case Mode::Opening: return "Opening";
    case Mode::Closing: return "Closing";
    case Mode::Interlock: return "Interlock";
  }
  return "?";
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::None: return "None";
    case Command::Open: return "Open";
    case Command::Close: return "Close";
    case Command::Interlock: return "Interlock";
  }
  return "?";
}

namespace {

Debounce step(Debounce d, bool raw, int limit) {
  if (raw == d.last_raw) {
    d.count = std::min(d.count + 1, limit);
  } else {
    d.last_raw = raw;
    d.count = 1;
  }
  // limit may have shrunk since the last tick
  d.count = std::min(d.count, limit);
  if (d.count >= limit) d.stable = raw;
  return d;
}

}  // namespace

FirmwareState debounce_update(FirmwareState state, const SwitchFrame& raw,
                              const FirmwareConfig& cfg) {
  state.open = step(state.open, raw.open_pressed, cfg.debounce_ticks);
  state.close = step(state.close, raw.close_pressed, cfg.debounce_ticks);
  return state;
}

Command resolve_command(bool stable_open, bool stable_close) {
  if (stable_open && stable_close) return Command::Interlock;
  if (stable_open) return Command::Open;
  if (stable_close) return Command::Close;
  return Command::None;
}

PinLevels outputs_for(Mode m) {
  PinLevels p;
  p.rb0_out = m == Mode::Opening;
  p.rb1_out = m == Mode::Closing;
  return p;
}

std::pair<FirmwareState, PinLevels> firmware_tick(FirmwareState state,
                                                  const SwitchFrame& raw,
                                                  const FirmwareConfig& cfg) {
  state = debounce_update(state, raw, cfg);
  const Command cmd = resolve_command(state.open.stable, state.close.stable);

  auto enter = [&](Mode m) {
    state.mode = m;
    state.remaining_ticks = (m == Mode::Opening || m == Mode::Closing) ? cfg.actuation_ticks : 0;
  };

  switch (state.mode) {
    case Mode::Idle:
      if (cmd == Command::Open) enter(Mode::Opening);
      else if (cmd == Command::Close) enter(Mode::Closing);
      else if (cmd == Command::Interlock) enter(Mode::Interlock);
      break;

    case Mode::Opening:
    case Mode::Closing: {
      const Command same = state.mode == Mode::Opening ? Command::Open : Command::Close;
      const Command opposite = state.mode == Mode::Opening ? Command::Close : Command::Open;
      if (cmd == Command::Interlock) {
        enter(Mode::Interlock);
      } else if (cmd == opposite) {
        // Reversal never happens inside a pulse: stop first, re-evaluate next tick.
        enter(Mode::Idle);
      } else if (--state.remaining_ticks <= 0) {
        if (cmd == same) state.remaining_ticks = cfg.actuation_ticks;
        else enter(Mode::Idle);
      }
      break;
    }

    case Mode::Interlock:
      if (cmd == Command::None) enter(Mode::Idle);
      break;
  }

  PinLevels pins = outputs_for(state.mode);
  pins.ra3_in = raw.open_pressed;
  pins.ra4_in = raw.close_pressed;
  return {state, pins};
}

}  // namespace gripsim::firmware
