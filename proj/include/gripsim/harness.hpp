#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gripsim/firmware.hpp"
#include "gripsim/hbridge.hpp"
#include "gripsim/motor_plant.hpp"
#include "gripsim/scenario.hpp"

namespace gripsim::harness {

/// Column order of the trace CSV; never reorder.
inline constexpr std::string_view kTraceHeader =
    "tick,open_sw,close_sw,ra3,ra4,rb0,rb1,drive_state,applied_v,current_a,omega,theta_out,"
    "grip_force_n";

struct TraceRecord {
  std::int64_t tick = 0;
  bool open_sw = false;
  bool close_sw = false;
  bool ra3 = false;
  bool ra4 = false;
  bool rb0 = false;
  bool rb1 = false;
  hbridge::DriveState drive_state = hbridge::DriveState::HighZ;
  double applied_v = 0.0;
  double current_a = 0.0;
  double omega = 0.0;
  double theta_out = 0.0;
  double grip_force_n = 0.0;
  firmware::Mode mode = firmware::Mode::Idle;  // not part of the CSV

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Switch levels entering the firmware on one tick: the true switch state
/// and the level actually seen on RA3/RA4 (equal unless contacts bounce).
struct RawInputs {
  bool open_sw = false;
  bool close_sw = false;
  bool ra3 = false;
  bool ra4 = false;
};

/// One sensor -> firmware -> bridge -> plant chain, advanced a tick at a time.
class Simulator {
 public:
  explicit Simulator(const Scenario& config);

  /// Executes tick `tick()` and advances. Module errors are rethrown as
  /// SimulationFault carrying the tick.
  TraceRecord step(const RawInputs& in);

  /// Swaps parameters between ticks; state is kept.
  void reconfigure(const Scenario& config);

  std::int64_t tick() const { return tick_; }
  const firmware::FirmwareState& firmware_state() const { return fw_; }
  const plant::PlantState& plant_state() const { return plant_; }

 private:
  Scenario cfg_;
  firmware::FirmwareState fw_;
  plant::PlantState plant_;
  std::int64_t tick_ = 0;
};

/// Turns a scenario's event list (or trace streams) into per-tick raw inputs.
class InputSource {
 public:
  explicit InputSource(const Scenario& s);
  RawInputs next();

 private:
  struct Chatter {
    std::int64_t until = -1;  // exclusive
  };

  const Scenario& s_;
  std::size_t next_event_ = 0;
  std::int64_t tick_ = 0;
  bool open_ = false;
  bool close_ = false;
  Chatter open_chatter_;
  Chatter close_chatter_;
  std::mt19937_64 rng_;
};

std::vector<TraceRecord> run_scenario(const Scenario& s);

/// Header line plus one row per record; floats with 9 significant digits.
std::string format_trace(const std::vector<TraceRecord>& records);
std::string format_record(const TraceRecord& r);
/// Throws IoFailure.
void write_trace(const std::vector<TraceRecord>& records, const std::filesystem::path& path);

}  // namespace gripsim::harness
