#include "thrustdir/ctrl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "thrustdir/errors.hpp"

namespace thrustdir::ctrl {

namespace {

struct ClampedRates {
  Vec3 body = Vec3::Zero();
  bool saturated = false;
};

ClampedRates clamp_body_rates(const Attitude& att, const Vec3& omega_inertial,
                              double omega_max) {
  ClampedRates out;
  out.body = att.matrix().transpose() * omega_inertial;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(out.body(i)) > omega_max) {
      out.body(i) = std::copysign(omega_max, out.body(i));
      out.saturated = true;
    }
  }
  return out;
}

}  // namespace

void CtrlEstimates::validate() const {
  if (!(mass > 0.0) || !(ka > 0.0) || c0 < 0.0 || c1 < 0.0 || !(cd0() > 0.0)) {
    throw ContractViolation(
        "estimates require mass > 0, ka > 0, c0 >= 0, c1 >= 0, c0 + 2 c1 > 0");
  }
}

CtrlGains CtrlGains::defaults_for(const CtrlEstimates& est, double g) {
  CtrlGains gains;
  const double weight = est.mass * g;
  gains.c2 = (weight / 10.0) * (weight / 10.0);
  gains.eps_singular = 1e-3 * weight;
  return gains;
}

void CtrlGains::validate() const {
  if (!(kv > 0.0) || !(ki > 0.0) || !(kI > 0.0) || !(k10 > 0.0) ||
      !(eps1 > 0.0) || !(c2 > 0.0) || !(delta_sat > 0.0) ||
      !(omega_max > 0.0) || !(eps_singular > 0.0) || !(antipodal_margin >= 0.0) ||
      !(thrust_max_factor > thrust_min_factor) || !(thrust_min_factor > 0.0)) {
    throw ContractViolation("controller gains must be strictly positive");
  }
  if (k1_power != 1 && k1_power != 2) {
    throw ContractViolation("k1_power must be 1 or 2");
  }
}

Vec3 xi(const CtrlGains& gains, const Vec3& iv, const Vec3& v_tilde) {
  return -gains.kv * v_tilde - gains.ki * iv;
}

Vec3 sat_smooth(const Vec3& x, double delta) {
  const double n2 = x.squaredNorm();
  const double d2 = delta * delta;
  return x * (delta / std::sqrt(std::sqrt(d2 * d2 + n2 * n2)));
}

Vec3 integral_rate(const CtrlGains& gains, const Vec3& iv, const Vec3& v_tilde) {
  return -gains.kI * iv + gains.kI * sat_smooth(iv + v_tilde / gains.kI, gains.delta_sat);
}

Vec3 update_iv(const CtrlGains& gains, const Vec3& iv, const Vec3& v_tilde, double dt) {
  if (!(dt > 0.0)) {
    throw ContractViolation("update_iv requires dt > 0");
  }
  const Vec3 k1 = integral_rate(gains, iv, v_tilde);
  const Vec3 k2 = integral_rate(gains, iv + 0.5 * dt * k1, v_tilde);
  const Vec3 k3 = integral_rate(gains, iv + 0.5 * dt * k2, v_tilde);
  const Vec3 k4 = integral_rate(gains, iv + dt * k3, v_tilde);
  Vec3 out = iv + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  const double n = out.norm();
  if (n > gains.delta_sat) {
    out *= gains.delta_sat / n;
  }
  return out;
}

Vec3 fp_bar(const CtrlEstimates& est, const Vec3& v_air, const Vec3& ar,
            const Vec3& xi_value, double g) {
  return aero::equivalent_drag(est.ka, est.cd0(), v_air) +
         est.mass * (g * Vec3::UnitZ() - ar - xi_value);
}

Vec3 fa_bar(const CtrlEstimates& est, const Vec3& v_air, const Attitude& att,
            const Vec3& ar, const Vec3& xi_value, double g) {
  return aero::force_inertial(est.model(), est.ka, v_air, att) +
         est.mass * (g * Vec3::UnitZ() - ar - xi_value);
}

UnitVec3 kr_from_force(const Vec3& fbar, double eps_singular) {
  geom::require_finite(fbar, "apparent force");
  const double n = fbar.norm();
  if (n < eps_singular) {
    throw SingularReference("apparent force |Fbar| = " + std::to_string(n) +
                            " N below " + std::to_string(eps_singular) + " N");
  }
  return UnitVec3(fbar);
}

ThrustCommand thrust_cmd(const CtrlEstimates& est, const CtrlGains& gains,
                         const Vec3& fa_bar_value, const Vec3& k, double g) {
  const double weight = est.mass * g;
  const double lo = gains.thrust_min_factor * weight;
  const double hi = gains.thrust_max_factor * weight * (1.0 - 1e-9);
  const double raw = fa_bar_value.dot(k);
  ThrustCommand cmd;
  cmd.thrust = std::clamp(raw, lo, hi);
  cmd.saturated = cmd.thrust != raw;
  return cmd;
}

double k1_gain(const CtrlGains& gains, const Vec3& k, const Vec3& kr) {
  const double base = 1.0 + k.dot(kr) + gains.eps1;
  return gains.k10 / (gains.k1_power == 2 ? base * base : base);
}

GammaPair gamma_and_dot(const Vec3& fbar, const Vec3& fbar_dot, double c2) {
  if (!(c2 > 0.0)) {
    throw ContractViolation("gamma requires c2 > 0");
  }
  GammaPair out;
  out.gamma = std::sqrt(c2 + fbar.squaredNorm());
  out.gamma_dot = fbar.dot(fbar_dot) / out.gamma;
  return out;
}

KinematicCommand omega_inertial(const CtrlGains& gains, const Vec3& k,
                                const Vec3& kr, const Vec3& omega_r,
                                double gamma_ratio) {
  const double c = k.dot(kr);
  if (c <= -1.0 + gains.antipodal_margin) {
    throw AntipodalAttitude("thrust axis antipodal to its reference (k.kr = " +
                            std::to_string(c) + ")");
  }
  KinematicCommand cmd;
  cmd.k1 = k1_gain(gains, k, kr);
  const double lambda = -omega_r.dot(k);
  cmd.omega = (cmd.k1 + gamma_ratio) * k.cross(kr) + omega_r + lambda * k;
  return cmd;
}

OmegaCommand omega_cmd(const CtrlGains& gains, const Attitude& att,
                       const UnitVec3& kr, const Vec3& kr_dot, double gamma,
                       double gamma_dot) {
  if (!(gamma > 0.0)) {
    throw ContractViolation("omega_cmd requires gamma > 0");
  }
  const Vec3 omega_r = kr.vec().cross(kr_dot);
  const KinematicCommand kin =
      omega_inertial(gains, att.k(), kr, omega_r, gamma_dot / gamma);
  const ClampedRates rates = clamp_body_rates(att, kin.omega, gains.omega_max);
  return {kin.omega, rates.body, kin.k1, rates.saturated};
}

double lyapunov_v1(double gamma, const Vec3& k, const Vec3& kr) {
  const double c = 1.0 + k.dot(kr);
  if (c <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * gamma * gamma * k.cross(kr).squaredNorm() / (c * c);
}

Feedforward feedforward_terms(const CtrlEstimates& est, const CtrlGains& gains,
                              const ReferenceSample& ref, const WindSample& wind,
                              double g) {
  const Vec3 u = ref.vr - wind.velocity;
  const Vec3 u_dot = ref.ar - wind.acceleration;
  const double speed = u.norm();
  const double cd_gain = est.ka * est.cd0();

  Feedforward ff;
  ff.fbar = -cd_gain * speed * u + est.mass * (g * Vec3::UnitZ() - ref.ar);
  ff.kr = kr_from_force(ff.fbar, gains.eps_singular);
  if (ref.smooth) {
    // d/dt (|u| u) = |u| u_dot + (u . u_dot / |u|) u
    Vec3 fp_dot = Vec3::Zero();
    if (speed > aero::kMinAirspeed) {
      fp_dot = -cd_gain * (speed * u_dot + (u.dot(u_dot) / speed) * u);
    }
    ff.fbar_dot = fp_dot - est.mass * ref.jr;
    const double n = ff.fbar.norm();
    const Vec3& kr = ff.kr.vec();
    ff.kr_dot = (ff.fbar_dot - kr * kr.dot(ff.fbar_dot)) / n;
    ff.omega_r = kr.cross(ff.kr_dot);
  }
  const GammaPair gp = gamma_and_dot(ff.fbar, ff.fbar_dot, gains.c2);
  ff.gamma = gp.gamma;
  ff.gamma_dot = gp.gamma_dot;
  return ff;
}

Controller::Controller(CtrlEstimates est, CtrlGains gains, ControllerMode mode,
                       double g)
    : est_(est), gains_(gains), mode_(mode), g_(g) {
  est_.validate();
  gains_.validate();
  if (!(g_ > 0.0)) {
    throw ContractViolation("controller gravity must be positive");
  }
}

ControllerOutput Controller::evaluate(const plant::VehicleState& state,
                                      const Vec3& iv, const ReferenceSample& ref,
                                      const WindSample& wind) const {
  const Vec3 v_air = state.v - wind.velocity;
  const Vec3 v_tilde = state.v - ref.vr;
  const Vec3 k = state.att.k();

  ControllerOutput out;
  Diagnostics& d = out.diag;
  d.xi = xi(gains_, iv, v_tilde);

  const Vec3 fa_b = fa_bar(est_, v_air, state.att, ref.ar, d.xi, g_);
  d.fa_bar_norm = fa_b.norm();

  Vec3 fbar;
  Vec3 omega_r = Vec3::Zero();
  double gamma_ratio = 0.0;
  if (mode_ == ControllerMode::fp) {
    fbar = fp_bar(est_, v_air, ref.ar, d.xi, g_);
    const Feedforward ff = feedforward_terms(est_, gains_, ref, wind, g_);
    omega_r = ff.omega_r;
    gamma_ratio = ff.gamma_dot / ff.gamma;
  } else {
    fbar = fa_b;
  }
  const UnitVec3 kr = kr_from_force(fbar, gains_.eps_singular);
  d.kr = kr.vec();
  d.fbar_norm = fbar.norm();
  d.gamma = std::sqrt(gains_.c2 + fbar.squaredNorm());

  const KinematicCommand kin = omega_inertial(gains_, k, kr, omega_r, gamma_ratio);
  const ClampedRates rates = clamp_body_rates(state.att, kin.omega, gains_.omega_max);
  const ThrustCommand thrust = thrust_cmd(est_, gains_, fa_b, k, g_);

  out.input.thrust = thrust.thrust;
  out.input.omega_body = rates.body;
  out.iv_rate = integral_rate(gains_, iv, v_tilde);

  d.k1 = kin.k1;
  // |dFa/dk| <= 4 c1 ka |v_a|^2 for the trig model; Fbar_p does not depend on k.
  const double sensitivity =
      mode_ == ControllerMode::fa
          ? 4.0 * est_.c1 * est_.ka * v_air.squaredNorm() / d.fbar_norm
          : 0.0;
  d.stiffness = kin.k1 * (1.0 + sensitivity);
  d.omega_saturated = rates.saturated;
  d.thrust_saturated = thrust.saturated;
  d.theta_tilde = geom::angle_between(k, kr);
  d.v1 = lyapunov_v1(d.gamma, k, kr);
  d.eps_norm = d.fbar_norm * k.cross(kr.vec().cross(k)).norm();
  const double speed = v_air.norm();
  d.alpha = speed < aero::kMinAirspeed
                ? 0.0
                : std::acos(std::clamp(-v_air.dot(k) / speed, -1.0, 1.0));
  return out;
}

ControllerOutput Controller::step(CtrlState& cs, const plant::VehicleState& state,
                                  const ReferenceSample& ref,
                                  const WindSample& wind, double dt) const {
  ControllerOutput out = evaluate(state, cs.iv, ref, wind);
  cs.iv = update_iv(gains_, cs.iv, state.v - ref.vr, dt);
  return out;
}

}  // namespace thrustdir::ctrl
