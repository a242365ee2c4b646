#pragma once

// Signal files: `# key=value` comment lines (sample_rate_hz and units are
// required), then the header `sample_index,value`, then one row per sample
// with consecutive indices from 0.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gripsim/emg.hpp"
#include "gripsim/pressure.hpp"

namespace gripsim::io {

struct SignalFile {
  double sample_rate_hz = 0.0;
  std::string units;
  std::map<std::string, std::string> meta;  // everything except rate and units
  std::vector<double> samples;
};

SignalFile read_signal_csv(const std::filesystem::path& path);
void write_signal_csv(const std::filesystem::path& path, const SignalFile& file);

sensors::EmgTrace read_emg_csv(const std::filesystem::path& path);
void write_emg_csv(const std::filesystem::path& path, const sensors::EmgTrace& trace);

sensors::PressureTrace read_pressure_csv(const std::filesystem::path& path);
void write_pressure_csv(const std::filesystem::path& path, const sensors::PressureTrace& trace);

}  // namespace gripsim::io
