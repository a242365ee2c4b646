#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gripsim {

/// Base class of every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bridge input voltage sits between the low and high logic thresholds.
class IndeterminateLogicLevel : public Error {
 public:
  explicit IndeterminateLogicLevel(double volts);
  double volts() const noexcept { return volts_; }

 private:
  double volts_;
};

/// The plant integrator produced a non-finite value (dt too large or bad params).
class NonFiniteState : public Error {
 public:
  explicit NonFiniteState(const std::string& field);
};

class WindowOutOfBounds : public Error {
 public:
  WindowOutOfBounds(std::size_t start, std::size_t len, std::size_t size);
};

class DegenerateBaseline : public Error {
 public:
  explicit DegenerateBaseline(const std::string& position);
};

class InvalidThresholds : public Error {
 public:
  InvalidThresholds(double on, double off);
};

/// Scenario or parameter validation failure. `field` is a dotted path.
class MalformedScenario : public Error {
 public:
  MalformedScenario(std::string field, std::string reason);
  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

class IoFailure : public Error {
 public:
  enum class Op { Read, Write };
  IoFailure(const std::string& path, const std::string& reason, Op op);
  Op op() const noexcept { return op_; }

 private:
  Op op_;
};

/// Signal CSV that does not follow the sample_index,value layout.
class MalformedCsv : public Error {
 public:
  MalformedCsv(const std::string& path, std::size_t line, const std::string& reason);
};

/// Wraps a module error with the tick at which it occurred.
class SimulationFault : public Error {
 public:
  SimulationFault(std::int64_t tick, const std::string& what);
  std::int64_t tick() const noexcept { return tick_; }

 private:
  std::int64_t tick_;
};

}  // namespace gripsim
