#include "thrustdir/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thrustdir/errors.hpp"

namespace thrustdir::sim {

namespace {

using geom::Attitude;
using geom::Mat3;

constexpr double kBoundaryTol = 1e-9;
constexpr std::size_t kMaxSubsteps = 10000000;

double snap_tol(double t) { return kBoundaryTol * std::max(1.0, std::abs(t)); }

struct Augmented {
  Vec3 p;
  Vec3 v;
  Mat3 r;
  Vec3 iv;
};

struct AugDerivative {
  Vec3 dp;
  Vec3 dv;
  Mat3 dr;
  Vec3 div;
};

Augmented axpy(const Augmented& x, double h, const AugDerivative& d) {
  return {x.p + h * d.dp, x.v + h * d.dv, x.r + h * d.dr, x.iv + h * d.div};
}

Vec3 clamp_ball(const Vec3& x, double radius) {
  const double n = x.norm();
  return n > radius ? Vec3(x * (radius / n)) : x;
}

TraceRow make_row(double t, const ctrl::ReferenceSample& ref,
                  const plant::VehicleState& state, const Vec3& iv,
                  const ctrl::ControllerOutput& out, double weight) {
  const ctrl::Diagnostics& d = out.diag;
  TraceRow row;
  row.t = t;
  row.vr = ref.vr / plant::kMach;
  row.v = state.v / plant::kMach;
  row.alpha_deg = geom::rad2deg(d.alpha);
  row.omega = out.input.omega_body;
  row.T_over_mg = out.input.thrust / weight;
  row.Fbar_over_mg = d.fbar_norm / weight;
  row.theta_tilde_deg = geom::rad2deg(d.theta_tilde);
  row.V1 = d.v1;
  row.Iv = iv;
  row.k1 = d.k1;
  row.gamma = d.gamma;
  row.eps_norm = d.eps_norm;
  row.omega_saturated = d.omega_saturated;
  row.thrust_saturated = d.thrust_saturated;
  row.ref_smooth = ref.smooth;
  return row;
}

std::size_t step_count(double duration, double dt) {
  return static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
}

void summarize(RunResult& result, const ReferenceProfile& profile,
               double force_scale) {
  double min_f = std::numeric_limits<double>::infinity();
  for (const TraceRow& row : result.trace) min_f = std::min(min_f, row.Fbar_over_mg);
  result.monitors.min_fbar_over_mg = result.trace.empty() ? 0.0 : min_f;
  result.monitors.lyapunov = lyapunov_monitor(result.trace, force_scale);
  if (!profile.segments().empty()) {
    result.monitors.segments = segment_error_summary(result.trace, profile);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Reference

ReferenceProfile::ReferenceProfile(std::vector<ReferenceSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) {
    throw ConfigError("reference needs at least one segment");
  }
  if (segments_.front().t_start != 0.0) {
    throw ConfigError("reference must start at t = 0");
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const ReferenceSegment& s = segments_[i];
    if (!std::isfinite(s.t_start) || !std::isfinite(s.t_end) || !(s.t_end > s.t_start)) {
      throw ConfigError("reference segment " + std::to_string(i) +
                        " needs t_end > t_start");
    }
    if (i > 0 && std::abs(s.t_start - segments_[i - 1].t_end) > snap_tol(s.t_start)) {
      throw ConfigError("reference segment " + std::to_string(i) +
                        " does not start where the previous one ends");
    }
    const bool finite = s.value.allFinite() && s.sinusoid.offset.allFinite() &&
                        s.sinusoid.amplitude.allFinite() &&
                        s.sinusoid.omega.allFinite() && s.sinusoid.phase.allFinite();
    if (!finite) {
      throw ConfigError("reference segment " + std::to_string(i) +
                        " has non-finite values");
    }
  }
}

void ReferenceProfile::require_covers(double duration) const {
  if (segments_.empty()) {
    throw ConfigError("reference profile is empty");
  }
  if (segments_.back().t_end < duration - snap_tol(duration)) {
    throw ConfigError("reference ends at " + std::to_string(segments_.back().t_end) +
                      " s, before the run duration " + std::to_string(duration) + " s");
  }
}

std::size_t ReferenceProfile::segment_index(double t) const {
  if (segments_.empty()) {
    throw ContractViolation("reference profile is empty");
  }
  std::size_t idx = 0;
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (t >= segments_[i].t_start - snap_tol(segments_[i].t_start)) idx = i;
  }
  return idx;
}

ctrl::ReferenceSample ReferenceProfile::sample(double t) const {
  return sample_in_segment(segment_index(t), t);
}

ctrl::ReferenceSample ReferenceProfile::sample_in_segment(std::size_t index,
                                                          double t) const {
  const ReferenceSegment& s = segments_.at(index);
  ctrl::ReferenceSample out;
  if (s.kind == ReferenceSegment::Kind::constant) {
    out.vr = s.value;
    return out;
  }
  const SinusoidAxes& q = s.sinusoid;
  for (int i = 0; i < 3; ++i) {
    const double arg = q.omega(i) * t + q.phase(i);
    const double w = q.omega(i);
    out.vr(i) = q.offset(i) + q.amplitude(i) * std::sin(arg);
    out.ar(i) = q.amplitude(i) * w * std::cos(arg);
    out.jr(i) = -q.amplitude(i) * w * w * std::sin(arg);
  }
  return out;
}

std::vector<double> ReferenceProfile::breakpoints() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < segments_.size(); ++i) out.push_back(segments_[i].t_start);
  return out;
}

ReferenceProfile reference_c701() {
  constexpr double M = plant::kMach;
  auto constant = [](double t0, double t1, const Vec3& v) {
    ReferenceSegment s;
    s.t_start = t0;
    s.t_end = t1;
    s.value = v;
    return s;
  };
  std::vector<ReferenceSegment> segs{
      constant(0.0, 10.0, Vec3(0.7 * M, 0.0, 0.0)),
      constant(10.0, 20.0, Vec3(0.0, -0.7 * M, 0.0)),
      constant(20.0, 30.0, Vec3(0.0, 0.0, -0.7 * M)),
      constant(30.0, 40.0, Vec3(-0.7 * M, 0.0, 0.0)),
  };
  ReferenceSegment wave;
  wave.t_start = 40.0;
  wave.t_end = 60.0;
  wave.kind = ReferenceSegment::Kind::sinusoid;
  wave.sinusoid.amplitude = Vec3(-0.5 * M, 0.6 * M, 0.6 * M);
  wave.sinusoid.omega = Vec3(geom::kPi / 5.0, geom::kPi / 10.0, geom::kPi / 10.0);
  wave.sinusoid.phase = Vec3(0.0, 0.0, geom::kPi / 2.0);
  segs.push_back(wave);
  return ReferenceProfile(std::move(segs));
}

ReferenceProfile constant_reference(const Vec3& vr, double duration) {
  ReferenceSegment s;
  s.t_end = duration;
  s.value = vr;
  return ReferenceProfile({s});
}

// ---------------------------------------------------------------------------
// Scenario

const char* to_string(TerminationKind kind) {
  switch (kind) {
    case TerminationKind::completed: return "completed";
    case TerminationKind::singular_reference: return "singular_reference";
    case TerminationKind::antipodal: return "antipodal";
    case TerminationKind::nonfinite: return "nonfinite";
  }
  return "unknown";
}

void Scenario::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ConfigError("duration must be positive");
  }
  if (!(dt > 0.0) || dt > duration) {
    throw ConfigError("dt must satisfy 0 < dt <= duration");
  }
  if (!(stiffness_step >= 0.0)) {
    throw ConfigError("stiffness_step must be non-negative");
  }
  if (decimation < 1) {
    throw ConfigError("decimation must be at least 1");
  }
  vehicle.validate();
  estimates.validate();
  gains.validate();
  reference.require_covers(duration);
  if (!initial.p0.allFinite() || !initial.v0.allFinite() || !initial.euler0.allFinite()) {
    throw ConfigError("initial condition must be finite");
  }
}

RunResult run(const Scenario& sc) {
  sc.validate();
  const ctrl::Controller controller(sc.estimates, sc.gains, sc.mode, sc.vehicle.gravity);
  const plant::VehicleParams& veh = sc.vehicle;
  const double weight = veh.mass * veh.gravity;
  const std::vector<double> breaks = sc.reference.breakpoints();

  RunResult result;
  plant::VehicleState state;
  state.p = sc.initial.p0;
  state.v = sc.initial.v0;
  state.att = Attitude::from_euler(sc.initial.euler0(0), sc.initial.euler0(1),
                                   sc.initial.euler0(2));
  Vec3 iv = Vec3::Zero();

  auto wind_at = [&](double t) {
    return ctrl::WindSample{veh.wind.velocity(t), veh.wind.acceleration(t)};
  };

  const std::size_t n_steps = step_count(sc.duration, sc.dt);
  double t_eval = 0.0;
  double t = 0.0;
  try {
    for (std::size_t n = 0; n < n_steps; ++n) {
      t = static_cast<double>(n) * sc.dt;
      const double h = std::min(sc.dt, sc.duration - t);
      const std::size_t seg = sc.reference.segment_index(t);
      bool smooth = true;
      for (double b : breaks) {
        if (n > 0 && b >= t - snap_tol(b) && b < t + h - snap_tol(b)) smooth = false;
      }
      auto ref_at = [&](double ts) {
        ctrl::ReferenceSample r = sc.reference.sample_in_segment(seg, ts);
        r.smooth = smooth;
        return r;
      };

      t_eval = t;
      const ctrl::ReferenceSample ref0 = ref_at(t);
      const ctrl::ControllerOutput out0 = controller.evaluate(state, iv, ref0, wind_at(t));
      if (n % static_cast<std::size_t>(sc.decimation) == 0) {
        result.trace.push_back(make_row(t, ref0, state, iv, out0, weight));
      }

      if (sc.sampling == Sampling::zero_order_hold) {
        const plant::VehicleState next = plant::step(veh, state, out0.input, t, h);
        iv = ctrl::update_iv(sc.gains, iv, state.v - ref0.vr, h);
        state = next;
        continue;
      }

      auto deriv = [&](const Augmented& x, double ts, ctrl::ControllerOutput* keep) {
        t_eval = ts;
        const plant::VehicleState s{x.p, x.v, Attitude(x.r)};
        const ctrl::ControllerOutput o =
            controller.evaluate(s, x.iv, ref_at(ts), wind_at(ts));
        const plant::StateDerivative d = plant::state_derivative(veh, s, o.input, ts);
        if (keep != nullptr) *keep = o;
        return AugDerivative{d.dp, d.dv, x.r * geom::skew(o.input.omega_body), o.iv_rate};
      };
      Augmented x{state.p, state.v, state.att.matrix(), iv};
      const plant::StateDerivative d0 = plant::state_derivative(veh, state, out0.input, t);
      AugDerivative k1{d0.dp, d0.dv, x.r * geom::skew(out0.input.omega_body),
                       out0.iv_rate};
      double stiffness = out0.diag.stiffness;
      double s = 0.0;
      std::size_t substeps = 0;
      while (h - s > 1e-12 * h) {
        double hs = h - s;
        if (sc.stiffness_step > 0.0 && hs * stiffness > sc.stiffness_step) {
          hs = sc.stiffness_step / stiffness;
        }
        if (++substeps > kMaxSubsteps) {
          throw NonFiniteState("step size underflow at t = " + std::to_string(t + s));
        }
        const double ts = t + s;
        const AugDerivative k2 = deriv(axpy(x, 0.5 * hs, k1), ts + 0.5 * hs, nullptr);
        const AugDerivative k3 = deriv(axpy(x, 0.5 * hs, k2), ts + 0.5 * hs, nullptr);
        const AugDerivative k4 = deriv(axpy(x, hs, k3), ts + hs, nullptr);
        const Augmented x1{
            x.p + hs / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp),
            x.v + hs / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv),
            x.r + hs / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr),
            x.iv + hs / 6.0 * (k1.div + 2.0 * k2.div + 2.0 * k3.div + k4.div)};
        if (!x1.p.allFinite() || !x1.v.allFinite() || !x1.r.allFinite() ||
            !x1.iv.allFinite()) {
          t_eval = ts + hs;
          throw NonFiniteState("state left the finite range at t = " +
                               std::to_string(ts + hs));
        }
        x = Augmented{x1.p, x1.v, geom::orthonormalize(x1.r),
                      clamp_ball(x1.iv, sc.gains.delta_sat)};
        s += hs;
        if (h - s > 1e-12 * h) {
          ctrl::ControllerOutput o;
          k1 = deriv(x, t + s, &o);
          stiffness = o.diag.stiffness;
        }
      }
      state = plant::VehicleState{x.p, x.v, Attitude(x.r)};
      iv = x.iv;
    }
    result.termination = {TerminationKind::completed, sc.duration, ""};
  } catch (const SingularReference& e) {
    result.termination = {TerminationKind::singular_reference, t_eval, e.what()};
  } catch (const AntipodalAttitude& e) {
    result.termination = {TerminationKind::antipodal, t_eval, e.what()};
  } catch (const NonFiniteState& e) {
    result.termination = {TerminationKind::nonfinite, t_eval, e.what()};
  } catch (const ContractViolation& e) {
    result.termination = {TerminationKind::nonfinite, t_eval, e.what()};
  }
  result.final_state = state;
  result.final_iv = iv;
  result.t_final = result.termination.kind == TerminationKind::completed
                       ? sc.duration
                       : t;
  summarize(result, sc.reference, weight);
  return result;
}

// ---------------------------------------------------------------------------
// Kinematic harness

void KinematicScenario::validate() const {
  if (!(duration > 0.0) || !(dt > 0.0) || dt > duration) {
    throw ConfigError("kinematic run needs 0 < dt <= duration");
  }
  if (!(k0.norm() > 0.0) || !(kr0.norm() > 0.0) || !(kr_axis.norm() > 0.0)) {
    throw ConfigError("kinematic run needs non-zero k0, kr0 and kr_axis");
  }
  if (!(gamma0 > 0.0) || !(std::abs(gamma_amplitude) < 1.0)) {
    throw ConfigError("kinematic run needs gamma0 > 0 and |gamma_amplitude| < 1");
  }
  if (!(max_substep_rotation > 0.0)) {
    throw ConfigError("max_substep_rotation must be positive");
  }
  gains.validate();
}

RunResult run_kinematic(const KinematicScenario& sc) {
  sc.validate();
  const ctrl::CtrlGains& gains = sc.gains;
  const Vec3 axis = sc.kr_axis.normalized();
  const Vec3 kr0 = sc.kr0.normalized();

  struct Targets {
    Vec3 kr;
    Vec3 omega_r;
    double gamma;
    double gamma_ratio;
  };
  auto targets = [&](double t) {
    const double angle = sc.kr_amplitude * std::sin(sc.kr_omega * t);
    const double rate = sc.kr_amplitude * sc.kr_omega * std::cos(sc.kr_omega * t);
    const Vec3 kr = geom::exp_so3(axis * angle) * kr0;
    const Vec3 kr_dot = rate * axis.cross(kr);
    const double gamma = sc.gamma0 * (1.0 + sc.gamma_amplitude * std::sin(sc.gamma_omega * t));
    const double gamma_dot =
        sc.gamma0 * sc.gamma_amplitude * sc.gamma_omega * std::cos(sc.gamma_omega * t);
    return Targets{kr, kr.cross(kr_dot), gamma, gamma_dot / gamma};
  };
  auto omega_at = [&](const Vec3& k, double t) {
    const Targets tg = targets(t);
    return ctrl::omega_inertial(gains, k, tg.kr, tg.omega_r, tg.gamma_ratio);
  };
  auto log_row = [&](double t, const Vec3& k, RunResult& res) {
    const Targets tg = targets(t);
    const ctrl::KinematicCommand cmd =
        ctrl::omega_inertial(gains, k, tg.kr, tg.omega_r, tg.gamma_ratio);
    TraceRow row;
    row.t = t;
    row.omega = cmd.omega;
    row.theta_tilde_deg = geom::rad2deg(geom::angle_between(k, tg.kr));
    row.V1 = ctrl::lyapunov_v1(tg.gamma, k, tg.kr);
    row.k1 = cmd.k1;
    row.gamma = tg.gamma;
    row.ref_smooth = true;
    res.trace.push_back(row);
  };

  RunResult result;
  Vec3 k = sc.k0.normalized();
  const std::size_t n_steps = step_count(sc.duration, sc.dt);
  double t = 0.0;
  double t_eval = 0.0;
  try {
    for (std::size_t n = 0; n < n_steps; ++n) {
      t = static_cast<double>(n) * sc.dt;
      t_eval = t;
      log_row(t, k, result);
      const double h_total = std::min(sc.dt, sc.duration - t);
      double s = 0.0;
      while (s < h_total - 1e-15) {
        const double ts = t + s;
        t_eval = ts;
        const Vec3 w1 = omega_at(k, ts).omega;
        double h = h_total - s;
        h = std::min(h, sc.max_substep_rotation / std::max(w1.norm(), 1e-12));
        const Vec3 d1 = w1.cross(k);
        const Vec3 ka = (k + 0.5 * h * d1).normalized();
        const Vec3 d2 = omega_at(ka, ts + 0.5 * h).omega.cross(ka);
        const Vec3 kb = (k + 0.5 * h * d2).normalized();
        const Vec3 d3 = omega_at(kb, ts + 0.5 * h).omega.cross(kb);
        const Vec3 kc = (k + h * d3).normalized();
        const Vec3 d4 = omega_at(kc, ts + h).omega.cross(kc);
        k = (k + h / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4)).normalized();
        if (!k.allFinite()) {
          throw NonFiniteState("thrust axis left the finite range at t = " +
                               std::to_string(ts + h));
        }
        s += h;
      }
    }
    t = sc.duration;
    t_eval = t;
    log_row(t, k, result);
    result.termination = {TerminationKind::completed, sc.duration, ""};
  } catch (const AntipodalAttitude& e) {
    result.termination = {TerminationKind::antipodal, t_eval, e.what()};
  } catch (const NonFiniteState& e) {
    result.termination = {TerminationKind::nonfinite, t_eval, e.what()};
  } catch (const ContractViolation& e) {
    result.termination = {TerminationKind::nonfinite, t_eval, e.what()};
  }
  result.final_state.att = Attitude::identity();
  result.t_final = t;
  summarize(result, ReferenceProfile{}, 1.0);
  return result;
}

}  // namespace thrustdir::sim
