#include "gripsim/pressure.hpp"

#include "gripsim/errors.hpp"

namespace gripsim::sensors {

std::vector<bool> strain_to_switch(const std::vector<double>& samples, double threshold_on,
                                   double threshold_off) {
  if (!(threshold_off < threshold_on)) throw InvalidThresholds(threshold_on, threshold_off);
  std::vector<bool> out;
  out.reserve(samples.size());
  bool on = false;
  for (double p : samples) {
    if (!on && p >= threshold_on) on = true;
    else if (on && p <= threshold_off) on = false;
    out.push_back(on);
  }
  return out;
}

}  // namespace gripsim::sensors
