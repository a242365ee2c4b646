#include "gripsim/motor_plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gripsim/errors.hpp"

namespace gripsim::plant {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(name) + " must be finite and > 0");
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw NonFiniteState(name);
}

}  // namespace

void MotorParams::validate() const {
  require_positive(r_ohm, "r_ohm");
  require_positive(ke, "ke");
  require_positive(kt, "kt");
  require_positive(j, "j");
  require_positive(b, "b");
  require_positive(gear_ratio, "gear_ratio");
  require_positive(gear_eff, "gear_eff");
  require_positive(supply_v, "supply_v");
  if (gear_ratio < 1.0) throw std::invalid_argument("gear_ratio must be >= 1");
  if (gear_eff > 1.0) throw std::invalid_argument("gear_eff must be <= 1");
}

double MotorParams::mechanical_time_constant() const { return j * r_ohm / (kt * ke); }

double MotorParams::speed_time_constant() const { return j / (b + kt * ke / r_ohm); }

void GripParams::validate() const {
  if (!std::isfinite(theta_min) || !std::isfinite(theta_max))
    throw std::invalid_argument("theta_min/theta_max must be finite");
  if (!(theta_min < theta_max)) throw std::invalid_argument("theta_min must be < theta_max");
  require_positive(lever_arm, "lever_arm");
  require_positive(max_grip_force, "max_grip_force");
}

PlantState plant_step(const PlantState& state, hbridge::DriveState drive, double applied_v,
                      const MotorParams& mp, const GripParams& gp, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("plant_step: dt must be > 0");

  double current = 0.0;
  switch (drive) {
    case hbridge::DriveState::Forward:
    case hbridge::DriveState::Reverse:
      current = (applied_v - mp.ke * state.omega) / mp.r_ohm;
      break;
    case hbridge::DriveState::Brake:
      current = -mp.ke * state.omega / mp.r_ohm;
      break;
    case hbridge::DriveState::HighZ:
      current = 0.0;
      break;
  }

  const double motor_torque = mp.kt * current;
  PlantState next;
  next.current_a = current;
  next.omega = state.omega + dt * (motor_torque - mp.b * state.omega) / mp.j;

  const double unclamped = state.theta_out + dt * (next.omega / mp.gear_ratio);
  next.theta_out = std::clamp(unclamped, gp.theta_min, gp.theta_max);

  const bool at_min = next.theta_out <= gp.theta_min;
  const bool at_max = next.theta_out >= gp.theta_max;
  const bool torque_into_limit = (at_min && motor_torque < 0.0) || (at_max && motor_torque > 0.0);
  const bool moving_into_limit = (at_min && next.omega < 0.0) || (at_max && next.omega > 0.0);

  // Rigid stop: the shaft cannot keep turning into the limit.
  if (torque_into_limit || moving_into_limit) next.omega = 0.0;

  if (torque_into_limit) {
    const double force = std::abs(output_torque(current, mp)) / gp.lever_arm;
    next.grip_force_n = std::min(force, gp.max_grip_force);
  }

  require_finite(next.current_a, "current_a");
  require_finite(next.omega, "omega");
  require_finite(unclamped, "theta_out");
  require_finite(next.grip_force_n, "grip_force_n");
  return next;
}

double steady_state_speed(const MotorParams& mp, double v, double tau_load_out) {
  const double drive_torque = mp.kt * v / mp.r_ohm;
  const double load_at_motor = tau_load_out / (mp.gear_ratio * mp.gear_eff);
  return (drive_torque - load_at_motor) / (mp.b + mp.kt * mp.ke / mp.r_ohm);
}

double output_torque(double current_a, const MotorParams& mp) {
  return mp.gear_ratio * mp.gear_eff * mp.kt * current_a;
}

double output_speed(double omega, const MotorParams& mp) { return omega / mp.gear_ratio; }

}  // namespace gripsim::plant
