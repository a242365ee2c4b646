#pragma once

#include <vector>

namespace gripsim::sensors {

/// Muscle pressure from the piezo sensor, in kPa.
struct PressureTrace {
  double sample_rate_hz = 1000.0;
  std::vector<double> samples;
};

/// Hysteresis comparator, initially off: switches on at the first sample
/// >= threshold_on and off at the first later sample <= threshold_off.
/// Throws InvalidThresholds unless threshold_off < threshold_on.
std::vector<bool> strain_to_switch(const std::vector<double>& samples, double threshold_on,
                                   double threshold_off);

inline std::vector<bool> strain_to_switch(const PressureTrace& trace, double threshold_on,
                                          double threshold_off) {
  return strain_to_switch(trace.samples, threshold_on, threshold_off);
}

}  // namespace gripsim::sensors
