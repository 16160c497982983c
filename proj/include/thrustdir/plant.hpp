// Translational Newton dynamics with angular velocity as a direct input:
//   m dv/dt = m g k0 + F_a(v - v_w, k) - T k,   d(i,j,k)/dt = omega x (i,j,k)
#pragma once

#include <vector>

#include "thrustdir/aero.hpp"
#include "thrustdir/geom.hpp"

namespace thrustdir::plant {

using geom::Attitude;
using geom::Vec3;

inline constexpr double kGravity = 9.81;  // m/s^2
inline constexpr double kMach = 340.0;    // m/s per Mach

/// One term amplitude * sin(omega t + phase), per axis.
struct WindSinusoid {
  Vec3 amplitude = Vec3::Zero();  ///< m/s
  Vec3 omega = Vec3::Zero();      ///< rad/s
  Vec3 phase = Vec3::Zero();      ///< rad
};

/// Inertial wind velocity: a constant plus a sum of sinusoids.
struct WindProfile {
  Vec3 constant = Vec3::Zero();
  std::vector<WindSinusoid> terms;

  Vec3 velocity(double t) const;
  Vec3 acceleration(double t) const;
  Vec3 jerk(double t) const;
};

struct VehicleParams {
  double mass = 100.0;        ///< kg
  double gravity = kGravity;  ///< m/s^2 along +k0
  aero::CoeffModel truth_aero = aero::TrigCoeffModel{0.1, 11.55};
  double ka = 0.3;  ///< kg/m
  WindProfile wind;

  /// Throws ContractViolation unless mass, gravity and ka are positive.
  void validate() const;
};

struct VehicleState {
  Vec3 p = Vec3::Zero();  ///< inertial position [m]
  Vec3 v = Vec3::Zero();  ///< inertial velocity [m/s]
  Attitude att;
};

struct ControlInput {
  double thrust = 0.0;              ///< N, along -k
  Vec3 omega_body = Vec3::Zero();  ///< rad/s, body components
};

struct StateDerivative {
  Vec3 dp = Vec3::Zero();
  Vec3 dv = Vec3::Zero();
  Vec3 omega_body = Vec3::Zero();
};

/// Truth aerodynamic force in inertial coordinates at time t.
Vec3 aero_force(const VehicleParams& params, const VehicleState& state, double t);

StateDerivative state_derivative(const VehicleParams& params,
                                 const VehicleState& state,
                                 const ControlInput& input, double t);

/// Classical RK4 on (p, v) with the input held over the step. Stage
/// attitudes come from the exact exponential map of the constant omega.
/// Throws NonFiniteState if the result is not finite.
VehicleState step(const VehicleParams& params, const VehicleState& state,
                  const ControlInput& input, double t, double dt);

/// Throws NonFiniteState when any state component is NaN or Inf.
void require_finite_state(const VehicleState& s, double t);

}  // namespace thrustdir::plant
