#include "thrustdir/plant.hpp"

#include <cmath>
#include <string>

#include "thrustdir/errors.hpp"

namespace thrustdir::plant {

Vec3 WindProfile::velocity(double t) const {
  Vec3 w = constant;
  for (const auto& s : terms) {
    for (int i = 0; i < 3; ++i) {
      w(i) += s.amplitude(i) * std::sin(s.omega(i) * t + s.phase(i));
    }
  }
  return w;
}

Vec3 WindProfile::acceleration(double t) const {
  Vec3 a = Vec3::Zero();
  for (const auto& s : terms) {
    for (int i = 0; i < 3; ++i) {
      a(i) += s.amplitude(i) * s.omega(i) * std::cos(s.omega(i) * t + s.phase(i));
    }
  }
  return a;
}

Vec3 WindProfile::jerk(double t) const {
  Vec3 j = Vec3::Zero();
  for (const auto& s : terms) {
    for (int i = 0; i < 3; ++i) {
      j(i) -= s.amplitude(i) * s.omega(i) * s.omega(i) *
              std::sin(s.omega(i) * t + s.phase(i));
    }
  }
  return j;
}

void VehicleParams::validate() const {
  if (!(mass > 0.0) || !(gravity > 0.0) || !(ka > 0.0)) {
    throw ContractViolation("vehicle requires mass > 0, gravity > 0, ka > 0");
  }
}

Vec3 aero_force(const VehicleParams& params, const VehicleState& state, double t) {
  return aero::force_inertial(params.truth_aero, params.ka,
                              state.v - params.wind.velocity(t), state.att);
}

StateDerivative state_derivative(const VehicleParams& params,
                                 const VehicleState& state,
                                 const ControlInput& input, double t) {
  const Vec3 fa = aero_force(params, state, t);
  StateDerivative d;
  d.dp = state.v;
  d.dv = params.gravity * Vec3::UnitZ() + fa / params.mass -
         (input.thrust / params.mass) * state.att.k();
  d.omega_body = input.omega_body;
  return d;
}

VehicleState step(const VehicleParams& params, const VehicleState& state,
                  const ControlInput& input, double t, double dt) {
  if (!(dt > 0.0)) {
    throw ContractViolation("plant step requires dt > 0");
  }
  geom::require_finite(input.omega_body, "angular velocity input");
  if (!std::isfinite(input.thrust)) {
    throw ContractViolation("non-finite thrust input");
  }

  // Attitude is known exactly at every stage time for constant omega.
  const bool rotating = !input.omega_body.isZero(0.0);
  auto attitude_at = [&](double h) {
    return rotating ? geom::integrate_attitude(state.att, input.omega_body, h)
                    : state.att;
  };
  const Attitude att_half = attitude_at(0.5 * dt);
  const Attitude att_end = attitude_at(dt);

  auto deriv = [&](const Vec3& p, const Vec3& v, const Attitude& att, double ts) {
    if (!p.allFinite() || !v.allFinite()) {
      throw NonFiniteState("state left the finite range at t = " + std::to_string(ts));
    }
    return state_derivative(params, VehicleState{p, v, att}, input, ts);
  };

  const StateDerivative k1 = deriv(state.p, state.v, state.att, t);
  const StateDerivative k2 = deriv(state.p + 0.5 * dt * k1.dp,
                                   state.v + 0.5 * dt * k1.dv, att_half, t + 0.5 * dt);
  const StateDerivative k3 = deriv(state.p + 0.5 * dt * k2.dp,
                                   state.v + 0.5 * dt * k2.dv, att_half, t + 0.5 * dt);
  const StateDerivative k4 = deriv(state.p + dt * k3.dp, state.v + dt * k3.dv,
                                   att_end, t + dt);

  VehicleState out;
  out.p = state.p + dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  out.v = state.v + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  out.att = att_end;
  require_finite_state(out, t + dt);
  return out;
}

void require_finite_state(const VehicleState& s, double t) {
  if (!s.p.allFinite() || !s.v.allFinite() || !s.att.matrix().allFinite()) {
    throw NonFiniteState("state left the finite range at t = " + std::to_string(t));
  }
}

}  // namespace thrustdir::plant
