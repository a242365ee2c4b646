#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gripsim/emg.hpp"
#include "gripsim/firmware.hpp"
#include "gripsim/motor_plant.hpp"

namespace gripsim::harness {

enum class SwitchId { Open, Close };
enum class SwitchAction { Press, Release };

struct SwitchEvent {
  std::int64_t tick = 0;
  SwitchId which = SwitchId::Open;
  SwitchAction action = SwitchAction::Press;

  friend bool operator==(const SwitchEvent&, const SwitchEvent&) = default;
};

struct DirectSwitches {};

/// A digital switch stream sampled at its own rate.
struct SwitchStream {
  std::filesystem::path source;
  double sample_rate_hz = 0.0;
  std::vector<bool> on;

  /// Level at time t; released past the end of the stream.
  bool at(double t_seconds) const;
};

enum class TraceKind { Pressure, EmgRms };

/// Open/close inputs produced by thresholding recorded traces.
struct ThresholdedTraces {
  TraceKind kind = TraceKind::Pressure;
  double threshold_on = 0.0;
  double threshold_off = 0.0;
  std::size_t window_samples = 0;  // EmgRms only
  SwitchStream open;
  SwitchStream close;
};

using SensorSource = std::variant<DirectSwitches, ThresholdedTraces>;

/// Contact chatter injected after every switch event, drawn from the scenario seed.
struct BounceModel {
  int max_ticks = 0;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  std::int64_t tick_period_us = 1000;
  std::int64_t duration_ticks = 1;
  std::optional<double> initial_theta;  // defaults to theta_max (open rest state)
  bool bridge_enabled = true;
  firmware::FirmwareConfig firmware_cfg;
  plant::MotorParams motor_params;
  plant::GripParams grip_params;
  std::vector<SwitchEvent> events;
  SensorSource sensor_source = DirectSwitches{};
  BounceModel bounce;
  std::optional<sensors::EmgProfile> emg_profile;  // generator settings for `emg synth`

  double dt() const { return static_cast<double>(tick_period_us) * 1e-6; }
  double start_theta() const { return initial_theta.value_or(grip_params.theta_max); }
};

/// Strict parse: unknown keys, wrong types and invariant violations all throw
/// MalformedScenario naming the dotted field path. Trace file references are
/// resolved against `base_dir` and loaded eagerly.
Scenario parse_scenario(const nlohmann::json& doc,
                        const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Throws MalformedScenario.
void validate(const Scenario& s);

/// Inverse of parse_scenario; trace sources are written as file references.
nlohmann::json scenario_to_json(const Scenario& s);

/// Applies one dotted-path numeric override (e.g. "motor_params.r_ohm") and
/// re-validates. Throws MalformedScenario; `s` is unchanged on failure.
void set_param(Scenario& s, std::string_view path, const nlohmann::json& value);

/// Strict parse of a generator profile; missing fields take the reference
/// profile's values. `path` prefixes error field names.
sensors::EmgProfile parse_emg_profile(const nlohmann::json& doc, const std::string& path = "");
/// Accepts a bare profile document or a scenario file carrying `emg_profile`.
sensors::EmgProfile load_emg_profile(const std::filesystem::path& path);
nlohmann::json emg_profile_to_json(const sensors::EmgProfile& p);

std::string_view to_string(SwitchId id);
std::string_view to_string(SwitchAction a);

}  // namespace gripsim::harness
