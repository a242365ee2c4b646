#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gripsim/errors.hpp"
#include "gripsim/scenario.hpp"

using namespace gripsim;
using namespace gripsim::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = GRIPSIM_SCENARIO_DIR;

// Returns the (field, reason) the parser rejected `doc` with.
std::pair<std::string, std::string> rejection(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const MalformedScenario& e) {
    return {e.field(), e.reason()};
  }
  return {"<accepted>", ""};
}

std::string rejection_at(const json& doc, const fs::path& base) {
  try {
    parse_scenario(doc, base);
  } catch (const MalformedScenario& e) {
    return e.field();
  }
  return "<accepted>";
}

json minimal() { return {{"duration_ticks", 10}}; }

}  // namespace

TEST_CASE("minimal scenario fills defaults") {
  const Scenario s = parse_scenario(minimal());
  CHECK(s.duration_ticks == 10);
  CHECK(s.tick_period_us == 1000);
  CHECK(s.seed == 0);
  CHECK(s.bridge_enabled);
  CHECK(s.events.empty());
  CHECK(std::holds_alternative<DirectSwitches>(s.sensor_source));
  CHECK(s.firmware_cfg.debounce_ticks == 20);
  CHECK(s.firmware_cfg.actuation_ticks == 100);
  CHECK(s.motor_params.r_ohm == 2.0);
  CHECK(s.grip_params.theta_max == 1.2);
  CHECK(s.start_theta() == 1.2);
  CHECK(s.dt() == 1e-3);
  CHECK(s.bounce.max_ticks == 0);
}

TEST_CASE("validation rules name the offending field") {
  json j = minimal();
  j["events"] = {{{"tick", 5}, {"switch", "open"}, {"action", "press"}},
                 {{"tick", 3}, {"switch", "open"}, {"action", "release"}}};
  CHECK(rejection(j) == std::pair<std::string, std::string>{"events", "not sorted"});

  j = minimal();
  j["colour"] = "red";
  CHECK(rejection(j).first == "colour");
  CHECK(rejection(j).second == "unknown key");

  j = minimal();
  j["motor_params"] = {{"r_ohm", 2.0}, {"inductance", 1e-3}};
  CHECK(rejection(j).first == "motor_params.inductance");

  j = minimal();
  j["motor_params"] = {{"r_ohm", -1.0}};
  CHECK(rejection(j).first == "motor_params.r_ohm");

  j = minimal();
  j["events"] = {{{"tick", 10}, {"switch", "open"}, {"action", "press"}}};
  CHECK(rejection(j).first == "events[0].tick");

  j = minimal();
  j["events"] = {{{"tick", 1}, {"switch", "middle"}, {"action", "press"}}};
  CHECK(rejection(j).first == "events[0].switch");

  CHECK(rejection(json::object()).first == "duration_ticks");
  CHECK(rejection({{"duration_ticks", 0}}).first == "duration_ticks");
  CHECK(rejection({{"duration_ticks", 1.5}}).first == "duration_ticks");
  CHECK(rejection({{"duration_ticks", "ten"}}).first == "duration_ticks");

  j = minimal();
  j["grip_params"] = {{"theta_min", 1.0}, {"theta_max", 0.5}};
  CHECK(rejection(j).first.starts_with("grip_params"));

  j = minimal();
  j["initial_theta"] = 2.0;
  CHECK(rejection(j).first == "initial_theta");

  j = minimal();
  j["motor_params"] = {{"supply_v", 1.5}};  // cannot reach a logic high
  CHECK(rejection(j).first == "motor_params.supply_v");

  j = minimal();
  j["firmware_cfg"] = {{"tick_period_us", 500}};
  CHECK(rejection(j).first == "firmware_cfg.tick_period_us");
}

TEST_CASE("file errors") {
  const fs::path dir = fs::temp_directory_path() / "gripsim_test_scenario";
  fs::create_directories(dir);
  CHECK_THROWS_AS(load_scenario(dir / "nope.json"), IoFailure);
  std::ofstream(dir / "bad.json") << "{\"duration_ticks\": 10,,}";
  try {
    load_scenario(dir / "bad.json");
    FAIL("accepted");
  } catch (const MalformedScenario& e) {
    CHECK(e.field() == "<json>");
  }
}

TEST_CASE("scenario json round trip") {
  for (const char* name : {"close.json", "open.json", "chatter.json"}) {
    const Scenario s = load_scenario(kScenarios / name);
    const Scenario back = parse_scenario(scenario_to_json(s));
    CHECK(scenario_to_json(back) == scenario_to_json(s));
    CHECK(back.events == s.events);
  }
}

TEST_CASE("reference files") {
  const Scenario close = load_scenario(kScenarios / "close.json");
  REQUIRE(close.events.size() == 1);
  CHECK(close.events[0] == SwitchEvent{100, SwitchId::Close, SwitchAction::Press});
  CHECK(close.start_theta() == close.grip_params.theta_max);

  const Scenario open = load_scenario(kScenarios / "open.json");
  CHECK(open.start_theta() == open.grip_params.theta_min);

  const Scenario chatter = load_scenario(kScenarios / "chatter.json");
  CHECK(chatter.bounce.max_ticks == 8);
}

TEST_CASE("pressure sensor source loads and thresholds its traces") {
  const Scenario s = load_scenario(kScenarios / "pressure_grip.json");
  const auto* src = std::get_if<ThresholdedTraces>(&s.sensor_source);
  REQUIRE(src != nullptr);
  CHECK(src->kind == TraceKind::Pressure);
  CHECK(src->threshold_on == 20.0);
  CHECK(src->threshold_off == 8.0);
  REQUIRE(src->close.on.size() == 1500);
  CHECK_FALSE(src->close.at(0.1));
  CHECK(src->close.at(0.5));
  CHECK_FALSE(src->close.at(0.9));
  CHECK(src->open.at(1.1));
  CHECK_FALSE(src->open.at(5.0));  // past the end reads as released

  json doc = scenario_to_json(s);
  doc["events"] = {{{"tick", 1}, {"switch", "open"}, {"action", "press"}}};
  CHECK_THROWS_AS(parse_scenario(doc, kScenarios), MalformedScenario);

  json missing = {{"duration_ticks", 10},
                  {"sensor_source",
                   {{"kind", "pressure"},
                    {"open_trace", "does_not_exist.csv"},
                    {"close_trace", "does_not_exist.csv"},
                    {"threshold_on_kpa", 5.0},
                    {"threshold_off_kpa", 1.0}}}};
  CHECK(rejection_at(missing, kScenarios) == "sensor_source.open_trace");

  missing["sensor_source"]["threshold_off_kpa"] = 9.0;
  CHECK_THROWS_AS(parse_scenario(missing, kScenarios), Error);
}

TEST_CASE("set_param applies whitelisted numeric overrides") {
  Scenario s = parse_scenario(minimal());
  set_param(s, "motor_params.r_ohm", 3.5);
  CHECK(s.motor_params.r_ohm == 3.5);
  set_param(s, "firmware_cfg.debounce_ticks", 5);
  CHECK(s.firmware_cfg.debounce_ticks == 5);
  set_param(s, "bridge_enabled", false);
  CHECK_FALSE(s.bridge_enabled);

  const Scenario before = s;
  CHECK_THROWS_AS(set_param(s, "motor_params.r_ohm", -1.0), MalformedScenario);
  CHECK_THROWS_AS(set_param(s, "name", 1), MalformedScenario);
  CHECK_THROWS_AS(set_param(s, "duration_ticks", 5), MalformedScenario);
  CHECK_THROWS_AS(set_param(s, "motor_params.j", "big"), MalformedScenario);
  CHECK(scenario_to_json(s) == scenario_to_json(before));
}

TEST_CASE("emg profile documents") {
  const sensors::EmgProfile p = load_emg_profile(kScenarios / "emg_profile.json");
  const sensors::EmgProfile ref = sensors::EmgProfile::reference();
  for (sensors::Position pos : sensors::kPositions) {
    for (sensors::Condition c : {sensors::Condition::Relaxed, sensors::Condition::Stressed})
      CHECK(p.amplitude(pos, c) == ref.amplitude(pos, c));
  }
  CHECK(p.sample_count() == 30029);

  const sensors::EmgProfile partial = parse_emg_profile({{"seed", 9}});
  CHECK(partial.seed == 9);
  CHECK(partial.amplitude(sensors::Position::S1, sensors::Condition::Stressed) == 30.0);

  try {
    parse_emg_profile({{"positions", {{"S9", {{"relaxed_uv", 1}}}}}}, "emg_profile");
    FAIL("accepted");
  } catch (const MalformedScenario& e) {
    CHECK(e.field() == "emg_profile.positions.S9");
  }

  json scenario = minimal();
  scenario["emg_profile"] = emg_profile_to_json(ref);
  const Scenario s = parse_scenario(scenario);
  REQUIRE(s.emg_profile.has_value());
  CHECK(s.emg_profile->seed == ref.seed);
}
