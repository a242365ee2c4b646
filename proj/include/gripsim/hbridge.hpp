#pragma once

#include <string_view>

namespace gripsim::hbridge {

/// Input thresholds of the L293D logic inputs.
inline constexpr double kLogicLowMaxV = 0.8;
inline constexpr double kLogicHighMinV = 2.3;

enum class Logic { Low, High };

/// Classifies an input voltage. Throws IndeterminateLogicLevel inside the
/// band (0.8 V, 2.3 V); there is no coercion. std::invalid_argument for v < 0.
Logic logic_level(double volts);

struct BridgeInputs {
  double in1_v = 0.0;
  double in2_v = 0.0;
  bool enabled = true;
  double supply_v = 6.0;
};

enum class DriveState { Forward, Reverse, Brake, HighZ };

std::string_view to_string(DriveState d);

struct DriveOutput {
  DriveState state = DriveState::HighZ;
  double applied_v = 0.0;      // 0 for Brake and HighZ
  bool terminals_connected = false;

  friend bool operator==(const DriveOutput&, const DriveOutput&) = default;
};

/// Ideal-switch truth table: enabled (1,0) Forward, (0,1) Reverse,
/// (0,0)/(1,1) Brake with shorted terminals; disabled floats the outputs.
DriveOutput drive(const BridgeInputs& in);

}  // namespace gripsim::hbridge
