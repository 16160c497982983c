// Thrust-direction velocity controller for axisymmetric vehicles.
//
// Outer loop: a saturated-integral PI term xi shapes the apparent force
//   Fbar_p = F_p(v_a) + m_hat (g k0 - a_r - xi),  F_p = -ka_hat C_D0 |v_a| v_a
// whose direction k_r is the reference thrust axis, independent of the
// current attitude. Thrust is T = Fbar_a . k with Fbar_a built from the full
// modeled aerodynamic force.
//
// Inner loop: the angular velocity
//   omega = (k1 + gamma_dot / gamma) k x k_r + omega_r + lambda k
// makes V1 = (gamma^2 / 2) (1 - k.k_r) / (1 + k.k_r) decay as exp(-2 k1 t).
#pragma once

#include "thrustdir/aero.hpp"
#include "thrustdir/geom.hpp"
#include "thrustdir/plant.hpp"

namespace thrustdir::ctrl {

using geom::Attitude;
using geom::UnitVec3;
using geom::Vec3;

/// Controller-side model parameters.
struct CtrlEstimates {
  double mass = 80.0;  ///< kg
  double ka = 0.24;    ///< kg/m
  double c0 = 0.1;
  double c1 = 11.55;

  double cd0() const { return c0 + 2.0 * c1; }
  aero::TrigCoeffModel model() const { return {c0, c1}; }
  /// Throws ContractViolation unless mass, ka, c0 + 2 c1 > 0 and c0, c1 >= 0.
  void validate() const;
};

struct CtrlGains {
  double kv = 5.0;     ///< 1/s
  double ki = 6.25;    ///< 1/s^2
  double kI = 50.0;    ///< 1/s, desaturation rate
  double k10 = 10.0;   ///< 1/s
  double eps1 = 0.01;
  int k1_power = 2;    ///< k1 = k10 / (1 + k.k_r + eps1)^k1_power, 1 or 2
  double c2 = 0.0;     ///< N^2, gamma = sqrt(c2 + |Fbar|^2)
  double delta_sat = 2.0;  ///< bound on |I_v| [m]
  double thrust_max_factor = 10.0;   ///< T < factor * m_hat g
  double thrust_min_factor = 1e-6;   ///< T >= factor * m_hat g
  double omega_max = 2.0 * geom::kPi;  ///< per body component [rad/s]
  double eps_singular = 0.0;  ///< N, |Fbar| below this aborts
  double antipodal_margin = 1e-9;  ///< k.k_r <= -1 + margin aborts

  /// Fills c2 = (m_hat g / 10)^2 and eps_singular = 1e-3 m_hat g.
  static CtrlGains defaults_for(const CtrlEstimates& est, double g);
  /// Throws ContractViolation for non-positive gains.
  void validate() const;
};

enum class ControllerMode {
  fp,  ///< reference direction from the equivalent-drag force Fbar_p
  fa,  ///< drag-only baseline: Fbar_a in place of Fbar_p, omega_r = 0
};

struct ReferenceSample {
  Vec3 vr = Vec3::Zero();  ///< m/s
  Vec3 ar = Vec3::Zero();  ///< m/s^2
  Vec3 jr = Vec3::Zero();  ///< m/s^3
  /// False on the step containing a reference discontinuity; derivative
  /// feedforward is zeroed there.
  bool smooth = true;
};

struct WindSample {
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
};

// ---------------------------------------------------------------------------
// Outer loop

/// xi = -kv v_tilde - ki I_v
Vec3 xi(const CtrlGains& gains, const Vec3& iv, const Vec3& v_tilde);

/// Smooth saturation x delta / (delta^4 + |x|^4)^(1/4).
Vec3 sat_smooth(const Vec3& x, double delta);

/// dI_v/dt = -kI I_v + kI sat(I_v + v_tilde / kI)
Vec3 integral_rate(const CtrlGains& gains, const Vec3& iv, const Vec3& v_tilde);

/// One RK4 step of the integral dynamics with v_tilde held, projected back
/// onto |I_v| <= delta (the exact flow never leaves that ball).
Vec3 update_iv(const CtrlGains& gains, const Vec3& iv, const Vec3& v_tilde, double dt);

/// Fbar_p = -ka_hat C_D0_hat |v_a| v_a + m_hat (g k0 - a_r - xi).
Vec3 fp_bar(const CtrlEstimates& est, const Vec3& v_air, const Vec3& ar,
            const Vec3& xi_value, double g);

/// Fbar_a = F_a_model(v_a, k) + m_hat (g k0 - a_r - xi).
Vec3 fa_bar(const CtrlEstimates& est, const Vec3& v_air, const Attitude& att,
            const Vec3& ar, const Vec3& xi_value, double g);

/// k_r = Fbar / |Fbar|. Throws SingularReference when |Fbar| < eps_singular.
UnitVec3 kr_from_force(const Vec3& fbar, double eps_singular);

struct ThrustCommand {
  double thrust = 0.0;
  bool saturated = false;
};

/// T = Fbar_a . k clamped to [min_factor, max_factor (1 - 1e-9)] m_hat g.
ThrustCommand thrust_cmd(const CtrlEstimates& est, const CtrlGains& gains,
                         const Vec3& fa_bar_value, const Vec3& k, double g);

// ---------------------------------------------------------------------------
// Inner loop

/// k1 = k10 / (1 + k.k_r + eps1)^power
double k1_gain(const CtrlGains& gains, const Vec3& k, const Vec3& kr);

struct GammaPair {
  double gamma = 0.0;
  double gamma_dot = 0.0;
};

/// gamma = sqrt(c2 + |F|^2), gamma_dot = F . F_dot / gamma.
GammaPair gamma_and_dot(const Vec3& fbar, const Vec3& fbar_dot, double c2);

/// Unclamped inertial angular velocity with lambda = -omega_r . k, so that
/// omega . k = 0. Throws AntipodalAttitude when k.k_r <= -1 + antipodal_margin.
struct KinematicCommand {
  Vec3 omega = Vec3::Zero();  ///< inertial frame
  double k1 = 0.0;
};
KinematicCommand omega_inertial(const CtrlGains& gains, const Vec3& k,
                                const Vec3& kr, const Vec3& omega_r,
                                double gamma_ratio);

struct OmegaCommand {
  Vec3 omega_inertial = Vec3::Zero();  ///< before clamping
  Vec3 omega_body = Vec3::Zero();      ///< clamped body components
  double k1 = 0.0;
  bool saturated = false;
};

/// Full inner-loop command with omega_r = k_r x k_r_dot, then per body
/// component clamp to omega_max.
OmegaCommand omega_cmd(const CtrlGains& gains, const Attitude& att,
                       const UnitVec3& kr, const Vec3& kr_dot, double gamma,
                       double gamma_dot);

/// (gamma^2 / 2) |k x k_r|^2 / (1 + k.k_r)^2
double lyapunov_v1(double gamma, const Vec3& k, const Vec3& kr);

// ---------------------------------------------------------------------------
// Feedforward along the reference trajectory (xi = 0)

struct Feedforward {
  Vec3 fbar = Vec3::Zero();      ///< Fbar_p along the reference
  Vec3 fbar_dot = Vec3::Zero();
  UnitVec3 kr;
  Vec3 kr_dot = Vec3::Zero();
  Vec3 omega_r = Vec3::Zero();
  double gamma = 0.0;
  double gamma_dot = 0.0;
};

/// Analytic chain rule on Fbar_p(v_r - v_w, a_r, 0). Derivative terms are
/// zero when `ref.smooth` is false. Throws SingularReference when the
/// reference force is below eps_singular.
Feedforward feedforward_terms(const CtrlEstimates& est, const CtrlGains& gains,
                              const ReferenceSample& ref, const WindSample& wind,
                              double g);

// ---------------------------------------------------------------------------
// Composition

struct Diagnostics {
  double alpha = 0.0;        ///< rad, angle between -k and v_a
  double theta_tilde = 0.0;  ///< rad, angle between k and k_r
  double fbar_norm = 0.0;    ///< |Fbar_p| (fp) or |Fbar_a| (fa) [N]
  double fa_bar_norm = 0.0;  ///< |Fbar_a| [N]
  double gamma = 0.0;
  double k1 = 0.0;
  double v1 = 0.0;
  double eps_norm = 0.0;     ///< m |eps| = |Fbar| |k x (k_r x k)| [N]
  /// Bound on the attitude-loop rate k1 (1 + |dFbar/dk| / |Fbar|) [1/s].
  double stiffness = 0.0;
  bool omega_saturated = false;
  bool thrust_saturated = false;
  Vec3 kr = Vec3::UnitZ();
  Vec3 xi = Vec3::Zero();
};

struct ControllerOutput {
  plant::ControlInput input;
  Vec3 iv_rate = Vec3::Zero();
  Diagnostics diag;
};

struct CtrlState {
  Vec3 iv = Vec3::Zero();
};

class Controller {
 public:
  /// Validates the configuration; throws ContractViolation.
  Controller(CtrlEstimates est, CtrlGains gains, ControllerMode mode,
             double g = plant::kGravity);

  /// Control law at one instant. Pure; throws SingularReference or
  /// AntipodalAttitude when the law is undefined.
  ControllerOutput evaluate(const plant::VehicleState& state, const Vec3& iv,
                            const ReferenceSample& ref,
                            const WindSample& wind) const;

  /// evaluate() then advances the integral state over dt.
  ControllerOutput step(CtrlState& cs, const plant::VehicleState& state,
                        const ReferenceSample& ref, const WindSample& wind,
                        double dt) const;

  const CtrlEstimates& estimates() const { return est_; }
  const CtrlGains& gains() const { return gains_; }
  ControllerMode mode() const { return mode_; }
  double gravity() const { return g_; }

 private:
  CtrlEstimates est_;
  CtrlGains gains_;
  ControllerMode mode_;
  double g_;
};

}  // namespace thrustdir::ctrl
