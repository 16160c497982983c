// Scenario runner: plant + controller over a timeline, trace logging and
// Lyapunov / tracking monitors.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "thrustdir/ctrl.hpp"
#include "thrustdir/plant.hpp"

namespace thrustdir::sim {

using geom::Vec3;

// ---------------------------------------------------------------------------
// Reference velocity

/// offset + amplitude * sin(omega t + phase), per inertial axis.
struct SinusoidAxes {
  Vec3 offset = Vec3::Zero();     ///< m/s
  Vec3 amplitude = Vec3::Zero();  ///< m/s
  Vec3 omega = Vec3::Zero();      ///< rad/s
  Vec3 phase = Vec3::Zero();      ///< rad
};

struct ReferenceSegment {
  enum class Kind { constant, sinusoid };

  double t_start = 0.0;
  double t_end = 0.0;
  Kind kind = Kind::constant;
  Vec3 value = Vec3::Zero();  ///< constant velocity [m/s]
  SinusoidAxes sinusoid;
};

/// Piecewise reference, right-continuous at segment boundaries.
class ReferenceProfile {
 public:
  ReferenceProfile() = default;
  /// Throws ConfigError unless the segments start at 0, are contiguous and
  /// each has t_end > t_start.
  explicit ReferenceProfile(std::vector<ReferenceSegment> segments);

  /// Throws ConfigError if the profile ends before `duration`.
  void require_covers(double duration) const;

  /// Segment containing t; the last segment extends past its end.
  std::size_t segment_index(double t) const;

  ctrl::ReferenceSample sample(double t) const;
  /// Evaluates one segment's formula at t, even outside its interval.
  ctrl::ReferenceSample sample_in_segment(std::size_t index, double t) const;

  /// Interior segment boundaries.
  std::vector<double> breakpoints() const;
  const std::vector<ReferenceSegment>& segments() const { return segments_; }

 private:
  std::vector<ReferenceSegment> segments_;
};

/// Five-segment missile profile (Mach): 0.7 i0, -0.7 j0, -0.7 k0, -0.7 i0 on
/// successive 10 s intervals, then -0.5 sin(pi t/5) i0 + 0.6 sin(pi t/10) j0
/// + 0.6 cos(pi t/10) k0 on [40, 60).
ReferenceProfile reference_c701();

ReferenceProfile constant_reference(const Vec3& vr, double duration);

// ---------------------------------------------------------------------------
// Scenario and trace

enum class Sampling {
  continuous,       ///< controller evaluated at every RK4 stage
  zero_order_hold,  ///< controller evaluated once per step, inputs held
};

struct InitialCondition {
  Vec3 p0 = Vec3::Zero();
  Vec3 v0 = Vec3::Zero();     ///< m/s
  Vec3 euler0 = Vec3::Zero();  ///< (roll, pitch, yaw) rad, R = Rz Ry Rx
};

struct Scenario {
  double duration = 60.0;  ///< s
  double dt = 1e-3;        ///< s
  int decimation = 10;     ///< log every n-th step
  plant::VehicleParams vehicle;
  ctrl::CtrlEstimates estimates;
  ctrl::CtrlGains gains = ctrl::CtrlGains::defaults_for(ctrl::CtrlEstimates{}, plant::kGravity);
  ReferenceProfile reference;
  InitialCondition initial;
  ctrl::ControllerMode mode = ctrl::ControllerMode::fp;
  Sampling sampling = Sampling::continuous;
  /// Continuous sampling splits a step so that h * stiffness stays below
  /// this value; 0 keeps fixed steps.
  double stiffness_step = 0.5;

  /// Throws ConfigError / ContractViolation on an invalid scenario.
  void validate() const;
};

/// One logged sample. Velocities in Mach, forces over the true m g.
struct TraceRow {
  double t = 0.0;
  Vec3 vr = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  double alpha_deg = 0.0;
  Vec3 omega = Vec3::Zero();  ///< body rad/s (inertial in kinematic runs)
  double T_over_mg = 0.0;
  double Fbar_over_mg = 0.0;
  double theta_tilde_deg = 0.0;
  double V1 = 0.0;
  Vec3 Iv = Vec3::Zero();
  // Monitor inputs, not part of the CSV.
  double k1 = 0.0;
  double gamma = 0.0;
  double eps_norm = 0.0;  ///< m |eps| [N]
  bool omega_saturated = false;
  bool thrust_saturated = false;
  bool ref_smooth = true;
};

enum class TerminationKind { completed, singular_reference, antipodal, nonfinite };

const char* to_string(TerminationKind kind);

struct Termination {
  TerminationKind kind = TerminationKind::completed;
  double t = 0.0;
  std::string message;
};

// ---------------------------------------------------------------------------
// Monitors

struct LyapunovReport {
  std::size_t intervals_checked = 0;
  std::size_t decay_violations = 0;
  double k1_min = 0.0;
  /// max of V1(t+D) / (V1(t) exp(-2 k1_min D)) over checked intervals.
  double max_growth_ratio = 0.0;
  /// Intervals skipped for omega saturation or reference jumps.
  std::vector<std::pair<double, double>> excluded_windows;
  std::size_t eps_rows_checked = 0;
  std::size_t eps_violations = 0;
  /// max of m|eps| / sqrt(8 V1) over rows.
  double max_eps_ratio = 0.0;
};

/// Checks V1(t+D) <= V1(t) exp(-2 k1_min D) (1 + tol) between consecutive
/// unsaturated, smooth rows, and m|eps| <= sqrt(8 V1)(1 + eps_tol) at every
/// row, with m|eps| rebuilt from Fbar_over_mg * force_scale * sin(theta).
LyapunovReport lyapunov_monitor(std::span<const TraceRow> trace,
                                double force_scale, double tol = 1e-3,
                                double eps_tol = 1e-6);

struct SegmentStats {
  std::size_t index = 0;
  ReferenceSegment::Kind kind = ReferenceSegment::Kind::constant;
  double t_start = 0.0;
  double t_end = 0.0;
  bool truncated = false;
  /// constant: mean |v - vr| over the last second [Mach]
  double terminal_error = 0.0;
  /// constant: per-second mean error non-increasing after its peak
  bool monotone_decay = false;
  /// sinusoid: max |v - vr| over the second half [Mach]
  double ultimate_bound = 0.0;
};

std::vector<SegmentStats> segment_error_summary(std::span<const TraceRow> trace,
                                                const ReferenceProfile& profile);

struct MonitorSummary {
  double min_fbar_over_mg = 0.0;
  LyapunovReport lyapunov;
  std::vector<SegmentStats> segments;
};

struct RunResult {
  std::vector<TraceRow> trace;
  Termination termination;
  MonitorSummary monitors;
  plant::VehicleState final_state;
  Vec3 final_iv = Vec3::Zero();
  double t_final = 0.0;
};

/// Steps plant and controller at dt over [0, duration]. Controller faults
/// end the run early and are reported in `termination`; rows logged before
/// the fault are kept.
RunResult run(const Scenario& scenario);

// ---------------------------------------------------------------------------
// Thrust-direction loop in isolation: dk/dt = omega x k with omega from the
// inner-loop law and analytic k_r(t), gamma(t).

struct KinematicScenario {
  double duration = 5.0;
  double dt = 1e-3;  ///< logging / check interval
  Vec3 k0 = Vec3::UnitZ();
  Vec3 kr0 = Vec3::UnitZ();
  /// k_r(t) = Rot(kr_axis, kr_amplitude sin(kr_omega t)) kr0
  Vec3 kr_axis = Vec3::UnitX();
  double kr_amplitude = 0.0;
  double kr_omega = 0.0;
  /// gamma(t) = gamma0 (1 + gamma_amplitude sin(gamma_omega t))
  double gamma0 = 1000.0;
  double gamma_amplitude = 0.0;
  double gamma_omega = 0.0;
  ctrl::CtrlGains gains = ctrl::CtrlGains::defaults_for(ctrl::CtrlEstimates{}, plant::kGravity);
  /// Substeps inside each interval keep |omega| h below this [rad].
  double max_substep_rotation = 0.02;

  void validate() const;
};

RunResult run_kinematic(const KinematicScenario& scenario);

}  // namespace thrustdir::sim
