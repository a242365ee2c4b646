#include "gripsim/hbridge.hpp"

#include <cmath>
#include <stdexcept>

#include "gripsim/errors.hpp"

namespace gripsim::hbridge {

Logic logic_level(double volts) {
  if (!(volts >= 0.0)) throw std::invalid_argument("logic_level: voltage must be >= 0");
  if (volts <= kLogicLowMaxV) return Logic::Low;
  if (volts >= kLogicHighMinV) return Logic::High;
  throw IndeterminateLogicLevel(volts);
}

std::string_view to_string(DriveState d) {
  switch (d) {
    case DriveState::Forward: return "Forward";
    case DriveState::Reverse: return "Reverse";
    case DriveState::Brake: return "Brake";
    case DriveState::HighZ: return "HighZ";
  }
  return "?";
}

DriveOutput drive(const BridgeInputs& in) {
  if (!(in.supply_v > 0.0) || !std::isfinite(in.supply_v))
    throw std::invalid_argument("drive: supply_v must be > 0");
  if (in.in1_v > in.supply_v || in.in2_v > in.supply_v)
    throw std::invalid_argument("drive: input voltage exceeds supply");

  const Logic a = logic_level(in.in1_v);
  const Logic b = logic_level(in.in2_v);

  if (!in.enabled) return {DriveState::HighZ, 0.0, false};
  if (a == Logic::High && b == Logic::Low) return {DriveState::Forward, in.supply_v, true};
  if (a == Logic::Low && b == Logic::High) return {DriveState::Reverse, -in.supply_v, true};
  return {DriveState::Brake, 0.0, true};
}

}  // namespace gripsim::hbridge
