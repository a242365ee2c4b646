#include "gripsim/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "gripsim/emg.hpp"
#include "gripsim/errors.hpp"
#include "gripsim/pressure.hpp"
#include "gripsim/signal_csv.hpp"

namespace gripsim::harness {

using nlohmann::json;

std::string_view to_string(SwitchId id) { return id == SwitchId::Open ? "open" : "close"; }
std::string_view to_string(SwitchAction a) {
  return a == SwitchAction::Press ? "press" : "release";
}

bool SwitchStream::at(double t_seconds) const {
  const double idx = std::floor(t_seconds * sample_rate_hz + 1e-9);
  if (idx < 0.0 || idx >= static_cast<double>(on.size())) return false;
  return on[static_cast<std::size_t>(idx)];
}

namespace {

std::string join(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

/// Walks one JSON object, rejecting keys that are never read.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object())
      throw MalformedScenario(path_.empty() ? "<root>" : path_, "expected an object");
  }

  const json* find(std::string_view key) {
    known_.emplace(key);
    auto it = obj_.find(std::string(key));
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& require(std::string_view key) {
    const json* v = find(key);
    if (v == nullptr) throw MalformedScenario(field(key), "required");
    return *v;
  }

  double number(std::string_view key, double fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) throw MalformedScenario(field(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw MalformedScenario(field(key), "must be finite");
    return d;
  }

  std::int64_t integer(std::string_view key, std::int64_t fallback) {
    const json* v = find(key);
    return v == nullptr ? fallback : as_integer(*v, field(key));
  }

  static std::int64_t as_integer(const json& v, const std::string& where) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15)
        return static_cast<std::int64_t>(d);
    }
    throw MalformedScenario(where, "expected an integer");
  }

  std::string string(std::string_view key, std::string fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) throw MalformedScenario(field(key), "expected a string");
    return v->get<std::string>();
  }

  bool boolean(std::string_view key, bool fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) throw MalformedScenario(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::string field(std::string_view key) const { return join(path_, key); }

  /// Call after all lookups.
  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!known_.contains(key)) throw MalformedScenario(join(path_, key), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string, std::less<>> known_;
};

std::uint64_t as_seed(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw MalformedScenario(where, "expected a non-negative integer");
}

int to_int(std::int64_t v, const std::string& where) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw MalformedScenario(where, "out of range");
  return static_cast<int>(v);
}

void positive(double v, const std::string& where) {
  if (!(v > 0.0)) throw MalformedScenario(where, "must be > 0");
}

firmware::FirmwareConfig parse_firmware(const json& j, std::int64_t tick_period_us) {
  ObjectReader r(j, "firmware_cfg");
  firmware::FirmwareConfig cfg;
  cfg.tick_period_us = r.integer("tick_period_us", tick_period_us);
  if (cfg.tick_period_us != tick_period_us)
    throw MalformedScenario("firmware_cfg.tick_period_us", "must equal tick_period_us");
  cfg.debounce_ticks = to_int(r.integer("debounce_ticks", cfg.debounce_ticks),
                              "firmware_cfg.debounce_ticks");
  cfg.actuation_ticks = to_int(r.integer("actuation_ticks", cfg.actuation_ticks),
                               "firmware_cfg.actuation_ticks");
  r.finish();
  return cfg;
}

plant::MotorParams parse_motor(const json& j) {
  ObjectReader r(j, "motor_params");
  plant::MotorParams m;
  m.r_ohm = r.number("r_ohm", m.r_ohm);
  m.ke = r.number("ke", m.ke);
  m.kt = r.number("kt", m.kt);
  m.j = r.number("j", m.j);
  m.b = r.number("b", m.b);
  m.gear_ratio = r.number("gear_ratio", m.gear_ratio);
  m.gear_eff = r.number("gear_eff", m.gear_eff);
  m.supply_v = r.number("supply_v", m.supply_v);
  r.finish();
  return m;
}

plant::GripParams parse_grip(const json& j) {
  ObjectReader r(j, "grip_params");
  plant::GripParams g;
  g.theta_min = r.number("theta_min", g.theta_min);
  g.theta_max = r.number("theta_max", g.theta_max);
  g.lever_arm = r.number("lever_arm", g.lever_arm);
  g.max_grip_force = r.number("max_grip_force", g.max_grip_force);
  r.finish();
  return g;
}

std::vector<SwitchEvent> parse_events(const json& j) {
  if (!j.is_array()) throw MalformedScenario("events", "expected an array");
  std::vector<SwitchEvent> events;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = fmt::format("events[{}]", i);
    ObjectReader r(j[i], where);
    SwitchEvent e;
    e.tick = ObjectReader::as_integer(r.require("tick"), where + ".tick");
    const std::string sw = r.string("switch", "");
    const std::string action = r.string("action", "");
    if (r.find("switch") == nullptr) throw MalformedScenario(where + ".switch", "required");
    if (r.find("action") == nullptr) throw MalformedScenario(where + ".action", "required");
    if (sw == "open") e.which = SwitchId::Open;
    else if (sw == "close") e.which = SwitchId::Close;
    else throw MalformedScenario(where + ".switch", "expected \"open\" or \"close\"");
    if (action == "press") e.action = SwitchAction::Press;
    else if (action == "release") e.action = SwitchAction::Release;
    else throw MalformedScenario(where + ".action", "expected \"press\" or \"release\"");
    r.finish();
    events.push_back(e);
  }
  return events;
}

SwitchStream load_stream(TraceKind kind, const std::filesystem::path& file,
                         const std::filesystem::path& base_dir, double on, double off,
                         std::size_t window, const std::string& where) {
  SwitchStream s;
  s.source = file;
  const std::filesystem::path resolved = file.is_absolute() ? file : base_dir / file;
  try {
    if (kind == TraceKind::Pressure) {
      const sensors::PressureTrace t = io::read_pressure_csv(resolved);
      s.sample_rate_hz = t.sample_rate_hz;
      s.on = sensors::strain_to_switch(t, on, off);
    } else {
      const sensors::EmgTrace t = io::read_emg_csv(resolved);
      s.sample_rate_hz = t.sample_rate_hz;
      s.on = sensors::strain_to_switch(sensors::rms_envelope(t, window), on, off);
    }
  } catch (const Error& e) {
    throw MalformedScenario(where, e.what());
  }
  return s;
}

SensorSource parse_sensor_source(const json& j, const std::filesystem::path& base_dir) {
  ObjectReader r(j, "sensor_source");
  const std::string kind = r.string("kind", "direct");
  if (kind == "direct") {
    r.finish();
    return DirectSwitches{};
  }

  ThresholdedTraces t;
  std::string unit;
  if (kind == "pressure") {
    t.kind = TraceKind::Pressure;
    unit = "kpa";
  } else if (kind == "emg_rms") {
    t.kind = TraceKind::EmgRms;
    unit = "uv";
    const std::int64_t w = r.integer("window_samples", 50);
    if (w < 1) throw MalformedScenario(r.field("window_samples"), "must be >= 1");
    t.window_samples = static_cast<std::size_t>(w);
  } else {
    throw MalformedScenario("sensor_source.kind",
                            "expected \"direct\", \"pressure\" or \"emg_rms\"");
  }
  const std::string on_key = "threshold_on_" + unit;
  const std::string off_key = "threshold_off_" + unit;
  if (r.find(on_key) == nullptr) throw MalformedScenario(r.field(on_key), "required");
  if (r.find(off_key) == nullptr) throw MalformedScenario(r.field(off_key), "required");
  t.threshold_on = r.number(on_key, 0.0);
  t.threshold_off = r.number(off_key, 0.0);
  if (!(t.threshold_off < t.threshold_on))
    throw MalformedScenario(r.field(off_key), "must be below " + on_key);

  const std::string open = r.string("open_trace", "");
  const std::string close = r.string("close_trace", "");
  if (open.empty()) throw MalformedScenario(r.field("open_trace"), "required");
  if (close.empty()) throw MalformedScenario(r.field("close_trace"), "required");
  r.finish();

  t.open = load_stream(t.kind, open, base_dir, t.threshold_on, t.threshold_off,
                       t.window_samples, "sensor_source.open_trace");
  t.close = load_stream(t.kind, close, base_dir, t.threshold_on, t.threshold_off,
                        t.window_samples, "sensor_source.close_trace");
  return t;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure(path.string(), "cannot open for reading", IoFailure::Op::Read);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw MalformedScenario("<json>", fmt::format("syntax error at byte {}: {}", e.byte, e.what()));
  }
}

}  // namespace

sensors::EmgProfile parse_emg_profile(const json& doc, const std::string& path) {
  ObjectReader r(doc, path);
  sensors::EmgProfile p = sensors::EmgProfile::reference();
  if (const json* seed = r.find("seed")) p.seed = as_seed(*seed, r.field("seed"));
  p.duration_s = r.number("duration_s", p.duration_s);
  p.sample_rate_hz = r.number("sample_rate_hz", p.sample_rate_hz);
  if (!(p.duration_s > 0.0)) throw MalformedScenario(r.field("duration_s"), "must be > 0");
  if (!(p.sample_rate_hz > 0.0)) throw MalformedScenario(r.field("sample_rate_hz"), "must be > 0");
  if (const json* positions = r.find("positions")) {
    const std::string where = r.field("positions");
    ObjectReader pr(*positions, where);
    for (sensors::Position pos : sensors::kPositions) {
      const std::string name(sensors::to_string(pos));
      if (const json* e = pr.find(name)) {
        ObjectReader er(*e, join(where, name));
        sensors::Envelope& env = p.envelopes[static_cast<std::size_t>(pos)];
        env.relaxed_uv = er.number("relaxed_uv", env.relaxed_uv);
        env.stressed_uv = er.number("stressed_uv", env.stressed_uv);
        if (env.relaxed_uv < 0.0) throw MalformedScenario(er.field("relaxed_uv"), "must be >= 0");
        if (env.stressed_uv < 0.0) throw MalformedScenario(er.field("stressed_uv"), "must be >= 0");
        er.finish();
      }
    }
    pr.finish();
  }
  r.finish();
  return p;
}

json emg_profile_to_json(const sensors::EmgProfile& p) {
  json positions = json::object();
  for (sensors::Position pos : sensors::kPositions) {
    const sensors::Envelope& e = p.envelopes[static_cast<std::size_t>(pos)];
    positions[std::string(sensors::to_string(pos))] = {{"relaxed_uv", e.relaxed_uv},
                                                       {"stressed_uv", e.stressed_uv}};
  }
  return {{"seed", p.seed},
          {"duration_s", p.duration_s},
          {"sample_rate_hz", p.sample_rate_hz},
          {"positions", std::move(positions)}};
}

sensors::EmgProfile load_emg_profile(const std::filesystem::path& path) {
  const json doc = read_json(path);
  if (doc.is_object() && doc.contains("duration_ticks")) {
    const Scenario s = parse_scenario(doc, path.parent_path());
    if (!s.emg_profile) throw MalformedScenario("emg_profile", "scenario has no emg_profile");
    return *s.emg_profile;
  }
  return parse_emg_profile(doc);
}

void validate(const Scenario& s) {
  if (s.tick_period_us <= 0) throw MalformedScenario("tick_period_us", "must be > 0");
  if (s.duration_ticks <= 0) throw MalformedScenario("duration_ticks", "must be > 0");
  if (s.firmware_cfg.tick_period_us != s.tick_period_us)
    throw MalformedScenario("firmware_cfg.tick_period_us", "must equal tick_period_us");
  if (s.firmware_cfg.debounce_ticks < 1)
    throw MalformedScenario("firmware_cfg.debounce_ticks", "must be >= 1");
  if (s.firmware_cfg.actuation_ticks < 1)
    throw MalformedScenario("firmware_cfg.actuation_ticks", "must be >= 1");

  const plant::MotorParams& m = s.motor_params;
  positive(m.r_ohm, "motor_params.r_ohm");
  positive(m.ke, "motor_params.ke");
  positive(m.kt, "motor_params.kt");
  positive(m.j, "motor_params.j");
  positive(m.b, "motor_params.b");
  positive(m.supply_v, "motor_params.supply_v");
  if (!(m.gear_ratio >= 1.0)) throw MalformedScenario("motor_params.gear_ratio", "must be >= 1");
  if (!(m.gear_eff > 0.0 && m.gear_eff <= 1.0))
    throw MalformedScenario("motor_params.gear_eff", "must be in (0, 1]");
  if (m.supply_v < 2.3)
    throw MalformedScenario("motor_params.supply_v",
                            "must be >= 2.3 V so logic-high outputs are readable by the bridge");

  const plant::GripParams& g = s.grip_params;
  if (!(g.theta_min < g.theta_max))
    throw MalformedScenario("grip_params.theta_min", "must be < grip_params.theta_max");
  positive(g.lever_arm, "grip_params.lever_arm");
  positive(g.max_grip_force, "grip_params.max_grip_force");

  if (s.initial_theta && !(*s.initial_theta >= g.theta_min && *s.initial_theta <= g.theta_max))
    throw MalformedScenario("initial_theta", "must lie within [theta_min, theta_max]");

  if (s.bounce.max_ticks < 0) throw MalformedScenario("bounce.max_ticks", "must be >= 0");

  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const SwitchEvent& e = s.events[i];
    if (e.tick < 0 || e.tick >= s.duration_ticks)
      throw MalformedScenario(fmt::format("events[{}].tick", i), "must be in [0, duration_ticks)");
    if (i > 0 && e.tick < s.events[i - 1].tick) throw MalformedScenario("events", "not sorted");
  }
  if (!s.events.empty() && !std::holds_alternative<DirectSwitches>(s.sensor_source))
    throw MalformedScenario("events", "must be empty unless sensor_source.kind is \"direct\"");
}

Scenario parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  ObjectReader r(doc, "");
  Scenario s;
  s.name = r.string("name", s.name);
  if (const json* seed = r.find("seed")) s.seed = as_seed(*seed, "seed");
  s.tick_period_us = r.integer("tick_period_us", s.tick_period_us);
  s.duration_ticks = ObjectReader::as_integer(r.require("duration_ticks"), "duration_ticks");
  if (r.find("initial_theta") != nullptr) s.initial_theta = r.number("initial_theta", 0.0);
  s.bridge_enabled = r.boolean("bridge_enabled", s.bridge_enabled);

  s.firmware_cfg.tick_period_us = s.tick_period_us;
  if (const json* f = r.find("firmware_cfg")) s.firmware_cfg = parse_firmware(*f, s.tick_period_us);
  if (const json* m = r.find("motor_params")) s.motor_params = parse_motor(*m);
  if (const json* g = r.find("grip_params")) s.grip_params = parse_grip(*g);
  if (const json* e = r.find("events")) s.events = parse_events(*e);
  if (const json* b = r.find("bounce")) {
    ObjectReader br(*b, "bounce");
    s.bounce.max_ticks = to_int(br.integer("max_ticks", 0), "bounce.max_ticks");
    br.finish();
  }
  if (const json* src = r.find("sensor_source")) s.sensor_source = parse_sensor_source(*src, base_dir);
  if (const json* p = r.find("emg_profile")) s.emg_profile = parse_emg_profile(*p, "emg_profile");
  r.finish();

  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_json(path), path.parent_path());
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["tick_period_us"] = s.tick_period_us;
  j["duration_ticks"] = s.duration_ticks;
  if (s.initial_theta) j["initial_theta"] = *s.initial_theta;
  j["bridge_enabled"] = s.bridge_enabled;
  j["firmware_cfg"] = {{"debounce_ticks", s.firmware_cfg.debounce_ticks},
                       {"actuation_ticks", s.firmware_cfg.actuation_ticks}};
  const plant::MotorParams& m = s.motor_params;
  j["motor_params"] = {{"r_ohm", m.r_ohm}, {"ke", m.ke},
                       {"kt", m.kt},       {"j", m.j},
                       {"b", m.b},         {"gear_ratio", m.gear_ratio},
                       {"gear_eff", m.gear_eff}, {"supply_v", m.supply_v}};
  const plant::GripParams& g = s.grip_params;
  j["grip_params"] = {{"theta_min", g.theta_min},
                      {"theta_max", g.theta_max},
                      {"lever_arm", g.lever_arm},
                      {"max_grip_force", g.max_grip_force}};
  json events = json::array();
  for (const SwitchEvent& e : s.events) {
    events.push_back({{"tick", e.tick},
                      {"switch", std::string(to_string(e.which))},
                      {"action", std::string(to_string(e.action))}});
  }
  j["events"] = std::move(events);
  if (s.bounce.max_ticks > 0) j["bounce"] = {{"max_ticks", s.bounce.max_ticks}};
  if (s.emg_profile) j["emg_profile"] = emg_profile_to_json(*s.emg_profile);

  if (const auto* t = std::get_if<ThresholdedTraces>(&s.sensor_source)) {
    const bool pressure = t->kind == TraceKind::Pressure;
    const std::string unit = pressure ? "kpa" : "uv";
    json src = {{"kind", pressure ? "pressure" : "emg_rms"},
                {"open_trace", t->open.source.string()},
                {"close_trace", t->close.source.string()},
                {"threshold_on_" + unit, t->threshold_on},
                {"threshold_off_" + unit, t->threshold_off}};
    if (!pressure) src["window_samples"] = t->window_samples;
    j["sensor_source"] = std::move(src);
  } else {
    j["sensor_source"] = {{"kind", "direct"}};
  }
  return j;
}

void set_param(Scenario& s, std::string_view path, const json& value) {
  static const std::set<std::string, std::less<>> kSettable = {
      "tick_period_us",          "initial_theta",          "bridge_enabled",
      "firmware_cfg.debounce_ticks", "firmware_cfg.actuation_ticks",
      "motor_params.r_ohm",      "motor_params.ke",        "motor_params.kt",
      "motor_params.j",          "motor_params.b",         "motor_params.gear_ratio",
      "motor_params.gear_eff",   "motor_params.supply_v",  "grip_params.theta_min",
      "grip_params.theta_max",   "grip_params.lever_arm",  "grip_params.max_grip_force"};
  if (!kSettable.contains(path))
    throw MalformedScenario(std::string(path), "not a settable parameter");
  if (!value.is_number() && !value.is_boolean())
    throw MalformedScenario(std::string(path), "expected a number");

  json doc = scenario_to_json(s);
  const std::string p(path);
  const auto dot = p.find('.');
  json& slot = dot == std::string::npos ? doc[p] : doc[p.substr(0, dot)][p.substr(dot + 1)];
  if (p == "bridge_enabled") {
    slot = value.is_boolean() ? value.get<bool>() : value.get<double>() != 0.0;
  } else {
    slot = value;
  }
  if (p == "tick_period_us") doc["firmware_cfg"].erase("tick_period_us");

  Scenario updated = [&] {
    // Trace sources are already loaded; rebuild around them instead of re-reading files.
    SensorSource src = s.sensor_source;
    doc["sensor_source"] = {{"kind", "direct"}};
    json events = std::move(doc["events"]);
    doc["events"] = json::array();
    Scenario out = parse_scenario(doc);
    out.events = parse_events(events);
    out.sensor_source = std::move(src);
    return out;
  }();
  validate(updated);
  s = std::move(updated);
}

}  // namespace gripsim::harness
