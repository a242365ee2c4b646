#include "gripsim/signal_csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

#include "gripsim/errors.hpp"

namespace gripsim::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

SignalFile read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure(path.string(), "cannot open for reading", IoFailure::Op::Read);

  SignalFile file;
  bool have_rate = false;
  bool have_header = false;
  std::string line;
  std::size_t lineno = 0;
  const std::string p = path.string();

  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view l = trim(line);
    if (l.empty()) continue;

    if (!have_header && l.front() == '#') {
      const std::string_view body = trim(l.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;  // free-form comment
      const std::string key(trim(body.substr(0, eq)));
      const std::string value(trim(body.substr(eq + 1)));
      if (key == "sample_rate_hz") {
        if (!parse_number(value, file.sample_rate_hz) || !(file.sample_rate_hz > 0.0))
          throw MalformedCsv(p, lineno, "sample_rate_hz must be a positive number");
        have_rate = true;
      } else if (key == "units") {
        file.units = value;
      } else {
        file.meta[key] = value;
      }
      continue;
    }

    if (!have_header) {
      if (l != "sample_index,value")
        throw MalformedCsv(p, lineno, "expected header 'sample_index,value'");
      have_header = true;
      continue;
    }

    const auto comma = l.find(',');
    if (comma == std::string_view::npos) throw MalformedCsv(p, lineno, "expected two columns");
    std::size_t index = 0;
    double value = 0.0;
    if (!parse_number(l.substr(0, comma), index))
      throw MalformedCsv(p, lineno, "bad sample_index");
    if (index != file.samples.size())
      throw MalformedCsv(p, lineno, fmt::format("sample_index {} out of sequence", index));
    if (!parse_number(l.substr(comma + 1), value) || !std::isfinite(value))
      throw MalformedCsv(p, lineno, "value must be a finite number");
    file.samples.push_back(value);
  }

  if (!have_rate) throw MalformedCsv(p, lineno, "missing '# sample_rate_hz=' comment");
  if (file.units.empty()) throw MalformedCsv(p, lineno, "missing '# units=' comment");
  if (!have_header) throw MalformedCsv(p, lineno, "missing header row");
  return file;
}

void write_signal_csv(const std::filesystem::path& path, const SignalFile& file) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure(path.string(), "cannot open for writing", IoFailure::Op::Write);
  out << fmt::format("# sample_rate_hz={:.9g}\n", file.sample_rate_hz);
  out << "# units=" << file.units << '\n';
  for (const auto& [k, v] : file.meta) out << "# " << k << '=' << v << '\n';
  out << "sample_index,value\n";
  fmt::memory_buffer buf;
  for (std::size_t i = 0; i < file.samples.size(); ++i)
    fmt::format_to(std::back_inserter(buf), "{},{:.9g}\n", i, file.samples[i]);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoFailure(path.string(), "write failed", IoFailure::Op::Write);
}

sensors::EmgTrace read_emg_csv(const std::filesystem::path& path) {
  SignalFile f = read_signal_csv(path);
  if (f.units != "uV") throw MalformedCsv(path.string(), 0, "EMG traces must have units=uV");
  sensors::EmgTrace t;
  t.sample_rate_hz = f.sample_rate_hz;
  t.samples = std::move(f.samples);
  if (auto it = f.meta.find("position"); it != f.meta.end()) {
    auto pos = sensors::parse_position(it->second);
    if (!pos) throw MalformedCsv(path.string(), 0, "unknown position '" + it->second + "'");
    t.position = *pos;
  }
  if (auto it = f.meta.find("condition"); it != f.meta.end()) {
    auto cond = sensors::parse_condition(it->second);
    if (!cond) throw MalformedCsv(path.string(), 0, "unknown condition '" + it->second + "'");
    t.condition = *cond;
  }
  return t;
}

void write_emg_csv(const std::filesystem::path& path, const sensors::EmgTrace& trace) {
  SignalFile f;
  f.sample_rate_hz = trace.sample_rate_hz;
  f.units = "uV";
  f.meta["position"] = std::string(sensors::to_string(trace.position));
  f.meta["condition"] = std::string(sensors::to_string(trace.condition));
  f.samples = trace.samples;
  write_signal_csv(path, f);
}

sensors::PressureTrace read_pressure_csv(const std::filesystem::path& path) {
  SignalFile f = read_signal_csv(path);
  if (f.units != "kPa")
    throw MalformedCsv(path.string(), 0, "pressure traces must have units=kPa");
  for (double v : f.samples)
    if (v < 0.0) throw MalformedCsv(path.string(), 0, "pressure samples must be >= 0");
  return {f.sample_rate_hz, std::move(f.samples)};
}

void write_pressure_csv(const std::filesystem::path& path, const sensors::PressureTrace& trace) {
  SignalFile f;
  f.sample_rate_hz = trace.sample_rate_hz;
  f.units = "kPa";
  f.samples = trace.samples;
  write_signal_csv(path, f);
}

}  // namespace gripsim::io
