#pragma once

#include "gripsim/hbridge.hpp"

namespace gripsim::plant {

/// Brushed DC gear motor. Defaults are synthetic values for a small 6 V
/// gear motor; only the supply voltage is a known quantity.
struct MotorParams {
  double r_ohm = 2.0;       // armature resistance
  double ke = 0.01;         // back-EMF constant, V*s/rad
  double kt = 0.01;         // torque constant, N*m/A
  double j = 1e-5;          // rotor inertia (gripper folded in), kg*m^2
  double b = 1e-5;          // viscous friction, N*m*s/rad
  double gear_ratio = 100.0;
  double gear_eff = 0.8;
  double supply_v = 6.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// J*R/(Kt*Ke), the datasheet mechanical time constant.
  double mechanical_time_constant() const;
  /// Time constant of the speed response including viscous friction.
  double speed_time_constant() const;
};

struct GripParams {
  double theta_min = 0.0;   // fully closed, rad
  double theta_max = 1.2;   // fully open, rad
  double lever_arm = 0.03;  // m
  double max_grip_force = 50.0;  // N, reporting clamp

  void validate() const;
};

struct PlantState {
  double current_a = 0.0;
  double omega = 0.0;     // motor shaft, rad/s
  double theta_out = 0.0; // output aperture, rad
  double grip_force_n = 0.0;

  friend bool operator==(const PlantState&, const PlantState&) = default;
};

/// Quasi-static armature current followed by a semi-implicit Euler step of
/// the shaft; the aperture is a hard-clamped integral of the output speed.
/// Throws NonFiniteState if any field leaves the finite range.
PlantState plant_step(const PlantState& state, hbridge::DriveState drive, double applied_v,
                      const MotorParams& mp, const GripParams& gp, double dt);

/// Closed-form steady motor-shaft speed for voltage `v` against a load torque
/// referred to the output shaft.
double steady_state_speed(const MotorParams& mp, double v, double tau_load_out);

/// Torque at the output shaft: N * eta * Kt * i.
double output_torque(double current_a, const MotorParams& mp);

/// Output-shaft speed for a given motor-shaft speed.
double output_speed(double omega, const MotorParams& mp);

}  // namespace gripsim::plant
