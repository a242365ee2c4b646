#include "gripsim/errors.hpp"

#include <fmt/format.h>

namespace gripsim {

IndeterminateLogicLevel::IndeterminateLogicLevel(double volts)
    : Error(fmt::format("IndeterminateLogicLevel: {:.9g} V is between the 0.8 V and 2.3 V thresholds",
                        volts)),
      volts_(volts) {}

NonFiniteState::NonFiniteState(const std::string& field)
    : Error(fmt::format("NonFiniteState: {} is not finite (time step too large?)", field)) {}

WindowOutOfBounds::WindowOutOfBounds(std::size_t start, std::size_t len, std::size_t size)
    : Error(fmt::format("WindowOutOfBounds: window [{}, {}+{}) exceeds trace of {} samples", start,
                        start, len, size)) {}

DegenerateBaseline::DegenerateBaseline(const std::string& position)
    : Error(fmt::format("DegenerateBaseline: baseline rms at {} is zero", position)) {}

InvalidThresholds::InvalidThresholds(double on, double off)
    : Error(fmt::format("InvalidThresholds: threshold_off ({:.9g}) must be below threshold_on ({:.9g})",
                        off, on)) {}

MalformedScenario::MalformedScenario(std::string field, std::string reason)
    : Error(fmt::format("MalformedScenario({}): {}", field, reason)),
      field_(std::move(field)),
      reason_(std::move(reason)) {}

IoFailure::IoFailure(const std::string& path, const std::string& reason, Op op)
    : Error(fmt::format("IoFailure: {}: {}", path, reason)), op_(op) {}

MalformedCsv::MalformedCsv(const std::string& path, std::size_t line, const std::string& reason)
    : Error(fmt::format("MalformedCsv: {}:{}: {}", path, line, reason)) {}

SimulationFault::SimulationFault(std::int64_t tick, const std::string& what)
    : Error(fmt::format("tick {}: {}", tick, what)), tick_(tick) {}

}  // namespace gripsim
