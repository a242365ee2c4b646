#include "gripsim/harness.hpp"

#include <fmt/format.h>

#include <fstream>
#include <variant>

#include "gripsim/errors.hpp"

namespace gripsim::harness {

Simulator::Simulator(const Scenario& config) : cfg_(config) {
  plant_.theta_out = cfg_.start_theta();
}

void Simulator::reconfigure(const Scenario& config) { cfg_ = config; }

TraceRecord Simulator::step(const RawInputs& in) {
  const std::int64_t tick = tick_;
  try {
    const firmware::SwitchFrame frame{in.ra3, in.ra4, tick};
    auto [fw, pins] = firmware::firmware_tick(fw_, frame, cfg_.firmware_cfg);

    const double supply = cfg_.motor_params.supply_v;
    const hbridge::BridgeInputs bridge{pins.rb0_out ? supply : 0.0, pins.rb1_out ? supply : 0.0,
                                       cfg_.bridge_enabled, supply};
    const hbridge::DriveOutput out = hbridge::drive(bridge);
    const plant::PlantState next = plant::plant_step(plant_, out.state, out.applied_v,
                                                     cfg_.motor_params, cfg_.grip_params, cfg_.dt());

    fw_ = fw;
    plant_ = next;
    ++tick_;

    TraceRecord r;
    r.tick = tick;
    r.open_sw = in.open_sw;
    r.close_sw = in.close_sw;
    r.ra3 = pins.ra3_in;
    r.ra4 = pins.ra4_in;
    r.rb0 = pins.rb0_out;
    r.rb1 = pins.rb1_out;
    r.drive_state = out.state;
    r.applied_v = out.applied_v;
    r.current_a = next.current_a;
    r.omega = next.omega;
    r.theta_out = next.theta_out;
    r.grip_force_n = next.grip_force_n;
    r.mode = fw.mode;
    return r;
  } catch (const SimulationFault&) {
    throw;
  } catch (const std::exception& e) {
    throw SimulationFault(tick, e.what());
  }
}

InputSource::InputSource(const Scenario& s) : s_(s), rng_(s.seed) {}

RawInputs InputSource::next() {
  const std::int64_t t = tick_++;
  RawInputs in;

  if (const auto* traces = std::get_if<ThresholdedTraces>(&s_.sensor_source)) {
    const double seconds = static_cast<double>(t) * s_.dt();
    in.open_sw = in.ra3 = traces->open.at(seconds);
    in.close_sw = in.ra4 = traces->close.at(seconds);
    return in;
  }

  while (next_event_ < s_.events.size() && s_.events[next_event_].tick == t) {
    const SwitchEvent& e = s_.events[next_event_++];
    const bool level = e.action == SwitchAction::Press;
    bool& sw = e.which == SwitchId::Open ? open_ : close_;
    Chatter& chatter = e.which == SwitchId::Open ? open_chatter_ : close_chatter_;
    if (sw != level && s_.bounce.max_ticks > 0) {
      const auto len = static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(s_.bounce.max_ticks + 1));
      chatter.until = t + len;
    }
    sw = level;
  }

  in.open_sw = open_;
  in.close_sw = close_;
  in.ra3 = t < open_chatter_.until ? (rng_() & 1U) != 0 : open_;
  in.ra4 = t < close_chatter_.until ? (rng_() & 1U) != 0 : close_;
  return in;
}

std::vector<TraceRecord> run_scenario(const Scenario& s) {
  validate(s);
  Simulator sim(s);
  InputSource inputs(s);
  std::vector<TraceRecord> records;
  records.reserve(static_cast<std::size_t>(s.duration_ticks));
  for (std::int64_t t = 0; t < s.duration_ticks; ++t) records.push_back(sim.step(inputs.next()));
  return records;
}

namespace {

// Braking a stopped shaft yields -0.0 current; print it as 0.
double unsigned_zero(double v) { return v == 0.0 ? 0.0 : v; }

void append_record(fmt::memory_buffer& buf, const TraceRecord& r) {
  fmt::format_to(std::back_inserter(buf),
                 "{},{:d},{:d},{:d},{:d},{:d},{:d},{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", r.tick,
                 r.open_sw, r.close_sw, r.ra3, r.ra4, r.rb0, r.rb1,
                 hbridge::to_string(r.drive_state), unsigned_zero(r.applied_v),
                 unsigned_zero(r.current_a), unsigned_zero(r.omega), unsigned_zero(r.theta_out),
                 unsigned_zero(r.grip_force_n));
}

}  // namespace

std::string format_record(const TraceRecord& r) {
  fmt::memory_buffer buf;
  append_record(buf, r);
  return fmt::to_string(buf);
}

std::string format_trace(const std::vector<TraceRecord>& records) {
  fmt::memory_buffer buf;
  buf.append(kTraceHeader);
  buf.push_back('\n');
  for (const TraceRecord& r : records) append_record(buf, r);
  return fmt::to_string(buf);
}

void write_trace(const std::vector<TraceRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure(path.string(), "cannot open for writing", IoFailure::Op::Write);
  const std::string text = format_trace(records);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoFailure(path.string(), "write failed", IoFailure::Op::Write);
}

}  // namespace gripsim::harness
