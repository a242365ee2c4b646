#include "gripsim/gateway/session.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>
#include <variant>

namespace gripsim::gateway {

using nlohmann::json;

std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::UnknownMessageType: return "UnknownMessageType";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::SimulationFault: return "SimulationFault";
  }
  return "?";
}

GatewayError::GatewayError(ErrorCode code, std::string detail)
    : Error(fmt::format("{}: {}", to_string(code), detail)), code_(code), detail_(std::move(detail)) {}

harness::Scenario default_live_scenario() {
  harness::Scenario s;
  s.name = "live";
  s.duration_ticks = 1;
  return s;
}

harness::Scenario live_config(const harness::Scenario& base, const json& overrides) {
  if (!overrides.is_null() && !overrides.is_object())
    throw MalformedScenario("<root>", "overrides must be an object");
  if (overrides.contains("events"))
    throw MalformedScenario("events", "not allowed for live sessions");
  if (overrides.contains("sensor_source"))
    throw MalformedScenario("sensor_source", "live sessions take switch input from the console");
  if (!std::holds_alternative<harness::DirectSwitches>(base.sensor_source))
    throw MalformedScenario("sensor_source", "live sessions take switch input from the console");

  json doc = harness::scenario_to_json(base);
  doc["events"] = json::array();
  if (overrides.is_object()) doc.merge_patch(overrides);
  return harness::parse_scenario(doc);
}

Session::Session(std::string id, harness::Scenario config)
    : id_(std::move(id)), cfg_(std::move(config)), sim_(cfg_), segment_cfg_(cfg_) {
  harness::validate(cfg_);
  cfg_.events.clear();
  segment_cfg_.events.clear();
}

double Session::tick_rate_hz() const { return 1e6 / static_cast<double>(cfg_.tick_period_us); }

namespace {

std::string required_string(const json& msg, const char* key) {
  auto it = msg.find(key);
  if (it == msg.end() || !it->is_string())
    throw GatewayError(ErrorCode::InvalidParam, fmt::format("'{}' must be a string", key));
  return it->get<std::string>();
}

}  // namespace

Effect Session::handle(const json& msg) {
  if (!msg.is_object()) throw GatewayError(ErrorCode::MalformedMessage, "expected a JSON object");
  auto type_it = msg.find("type");
  if (type_it == msg.end() || !type_it->is_string())
    throw GatewayError(ErrorCode::MalformedMessage, "missing string field 'type'");
  const std::string type = type_it->get<std::string>();

  if (type == "press" || type == "release") {
    const std::string sw = required_string(msg, "switch");
    harness::SwitchId which;
    if (sw == "open") which = harness::SwitchId::Open;
    else if (sw == "close") which = harness::SwitchId::Close;
    else throw GatewayError(ErrorCode::InvalidParam, "switch must be \"open\" or \"close\"");
    const bool level = type == "press";
    (which == harness::SwitchId::Open ? open_sw_ : close_sw_) = level;
    if (replayable_) {
      log_.push_back({sim_.tick(), which,
                      level ? harness::SwitchAction::Press : harness::SwitchAction::Release});
    }
    return {};
  }

  if (type == "pause") {
    paused_ = true;
    return {Effect::Kind::Pause};
  }
  if (type == "resume") {
    paused_ = false;
    return {Effect::Kind::Resume};
  }

  if (type == "reset") {
    close_segment();
    sim_ = harness::Simulator(cfg_);
    open_sw_ = close_sw_ = false;
    segment_cfg_ = cfg_;
    replayable_ = true;
    return {Effect::Kind::Reset};
  }

  if (type == "subscribe") {
    auto it = msg.find("rate_hz");
    if (it == msg.end() || !it->is_number())
      throw GatewayError(ErrorCode::InvalidParam, "'rate_hz' must be a number");
    const double rate = it->get<double>();
    if (!(rate >= 1.0 && rate <= tick_rate_hz()))
      throw GatewayError(ErrorCode::InvalidParam,
                         fmt::format("rate_hz must be in [1, {:g}]", tick_rate_hz()));
    const auto decimation = static_cast<std::int64_t>(std::floor(tick_rate_hz() / rate + 1e-9));
    return {Effect::Kind::Subscribe, std::max<std::int64_t>(decimation, 1)};
  }

  if (type == "set_params") {
    const std::string path = required_string(msg, "path");
    auto it = msg.find("value");
    if (it == msg.end()) throw GatewayError(ErrorCode::InvalidParam, "'value' is required");
    harness::Scenario updated = cfg_;
    try {
      harness::set_param(updated, path, *it);
    } catch (const MalformedScenario& e) {
      throw GatewayError(ErrorCode::InvalidParam, e.what());
    }
    if (sim_.tick() == 0) {
      // Still at rest: rebuild so the arm starts from the new limits and the
      // segment stays replayable.
      cfg_ = updated;
      cfg_.events.clear();
      segment_cfg_ = cfg_;
      sim_ = harness::Simulator(cfg_);
      return {Effect::Kind::Reconfigured};
    }
    const double theta = sim_.plant_state().theta_out;
    if (theta < updated.grip_params.theta_min || theta > updated.grip_params.theta_max)
      throw GatewayError(ErrorCode::InvalidParam, "grip limits must contain the current aperture");
    if (replayable_) {
      // The log cannot express a parameter change; keep the prefix that replays.
      close_segment();
      replayable_ = false;
    }
    cfg_ = updated;
    cfg_.events.clear();
    sim_.reconfigure(cfg_);
    return {Effect::Kind::Reconfigured};
  }

  throw GatewayError(ErrorCode::UnknownMessageType, fmt::format("unknown message type '{}'", type));
}

harness::TraceRecord Session::step() {
  return sim_.step({open_sw_, close_sw_, open_sw_, close_sw_});
}

std::optional<harness::Scenario> Session::event_log() const {
  if (!replayable_ || sim_.tick() == 0) return std::nullopt;
  harness::Scenario s = segment_cfg_;
  s.name = fmt::format("{}-{}", id_, segment_index_);
  s.seed = 0;
  s.bounce = {};
  s.duration_ticks = sim_.tick();
  s.events.clear();
  for (const harness::SwitchEvent& e : log_)
    if (e.tick < s.duration_ticks) s.events.push_back(e);
  return s;
}

void Session::close_segment() {
  if (auto log = event_log()) finished_.push_back(std::move(*log));
  log_.clear();
  ++segment_index_;
}

std::vector<harness::Scenario> Session::take_finished_segments() {
  return std::exchange(finished_, {});
}

json state_frame(const harness::TraceRecord& r, std::uint64_t underruns) {
  return {{"type", "state"},
          {"tick", r.tick},
          {"theta", r.theta_out},
          {"omega", r.omega},
          {"drive", std::string(hbridge::to_string(r.drive_state))},
          {"mode", std::string(firmware::to_string(r.mode))},
          {"rb0", r.rb0 ? 1 : 0},
          {"rb1", r.rb1 ? 1 : 0},
          {"grip_force", r.grip_force_n},
          {"open_sw", r.open_sw ? 1 : 0},
          {"close_sw", r.close_sw ? 1 : 0},
          {"underruns", underruns}};
}

json ack_message(std::uint64_t seq) { return {{"type", "ack"}, {"seq", seq}}; }

json error_message(ErrorCode code, std::string_view detail, std::optional<std::uint64_t> seq) {
  json j = {{"type", "error"}, {"code", std::string(to_string(code))}, {"detail", std::string(detail)}};
  if (seq) j["seq"] = *seq;
  return j;
}

SessionIds::SessionIds() {
  std::random_device rd;
  prefix_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string SessionIds::next() {
  std::lock_guard lock(mu_);
  return fmt::format("{:016x}{:04x}", prefix_, ++counter_);
}

}  // namespace gripsim::gateway
