#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gripsim/errors.hpp"
#include "gripsim/harness.hpp"
#include "gripsim/scenario.hpp"

namespace gripsim::gateway {

enum class ErrorCode {
  UnknownSession,
  UnknownMessageType,
  InvalidParam,
  MalformedMessage,
  SimulationFault,  // the live run stopped on a module error
};

std::string_view to_string(ErrorCode c);

/// Rejected client message. Carried back to the client as an error reply.
class GatewayError : public Error {
 public:
  GatewayError(ErrorCode code, std::string detail);
  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Scenario used for live sessions when no base file is given.
harness::Scenario default_live_scenario();

/// Merges a partial scenario document onto `base` and validates it. Live
/// sessions take input from the console only, so events and non-direct
/// sensor sources are rejected. Throws MalformedScenario.
harness::Scenario live_config(const harness::Scenario& base, const nlohmann::json& overrides);

/// What the transport has to do after a message was applied.
struct Effect {
  enum class Kind { None, Pause, Resume, Reset, Subscribe, Reconfigured };
  Kind kind = Kind::None;
  std::int64_t decimation = 0;  // Subscribe: emit every n-th tick
};

/// Live simulation state for one operator. Not thread-safe: the owner must
/// serialize handle() and step() (the server runs both on one strand).
class Session {
 public:
  Session(std::string id, harness::Scenario config);

  const std::string& id() const { return id_; }
  const harness::Scenario& config() const { return cfg_; }
  std::int64_t tick() const { return sim_.tick(); }
  bool paused() const { return paused_; }
  double tick_rate_hz() const;

  /// Applies one client message between ticks. Throws GatewayError.
  Effect handle(const nlohmann::json& msg);

  /// Executes one tick with the current switch inputs.
  harness::TraceRecord step();

  /// Replayable scenario for the ticks executed in the current log segment,
  /// or nothing if the segment is empty or no longer replayable.
  std::optional<harness::Scenario> event_log() const;

  /// Segments closed by reset or by a mid-run parameter change.
  std::vector<harness::Scenario> take_finished_segments();

 private:
  void close_segment();

  std::string id_;
  harness::Scenario cfg_;
  harness::Simulator sim_;
  bool paused_ = true;
  bool open_sw_ = false;
  bool close_sw_ = false;

  harness::Scenario segment_cfg_;
  std::vector<harness::SwitchEvent> log_;
  bool replayable_ = true;
  int segment_index_ = 0;
  std::vector<harness::Scenario> finished_;
};

/// Telemetry frame for one executed tick.
nlohmann::json state_frame(const harness::TraceRecord& r, std::uint64_t underruns);
nlohmann::json ack_message(std::uint64_t seq);
nlohmann::json error_message(ErrorCode code, std::string_view detail,
                             std::optional<std::uint64_t> seq = std::nullopt);

/// Hands out unique opaque session ids.
class SessionIds {
 public:
  SessionIds();
  std::string next();

 private:
  std::mutex mu_;
  std::uint64_t prefix_;
  std::uint64_t counter_ = 0;
};

}  // namespace gripsim::gateway
