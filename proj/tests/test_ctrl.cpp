#include <gtest/gtest.h>

#include <cmath>

#include "gen.hpp"
#include "thrustdir/ctrl.hpp"
#include "thrustdir/errors.hpp"

namespace thrustdir::ctrl {
namespace {

using geom::kPi;
using testgen::Gen;

constexpr double kG = plant::kGravity;

CtrlGains default_gains() { return CtrlGains::defaults_for(CtrlEstimates{}, kG); }

// Reference velocity -0.5 sin(pi t/5) i + 0.6 sin(pi t/10) j + 0.6 cos(pi t/10) k, in Mach.
ReferenceSample sinusoid_reference(double t) {
  const double m = plant::kMach;
  const double w1 = kPi / 5, w2 = kPi / 10;
  ReferenceSample r;
  r.vr = m * Vec3(-0.5 * std::sin(w1 * t), 0.6 * std::sin(w2 * t), 0.6 * std::cos(w2 * t));
  r.ar = m * Vec3(-0.5 * w1 * std::cos(w1 * t), 0.6 * w2 * std::cos(w2 * t),
                  -0.6 * w2 * std::sin(w2 * t));
  r.jr = m * Vec3(0.5 * w1 * w1 * std::sin(w1 * t), -0.6 * w2 * w2 * std::sin(w2 * t),
                  -0.6 * w2 * w2 * std::cos(w2 * t));
  return r;
}

TEST(Ctrl, XiValuesAndLinearity) {
  const CtrlGains g = default_gains();
  EXPECT_EQ(xi(g, Vec3::Zero(), Vec3::Zero()), Vec3::Zero());
  EXPECT_EQ(xi(g, Vec3::Zero(), Vec3(1, 0, 0)), Vec3(-5, 0, 0));
  Gen gen(41);
  for (int n = 0; n < 200; ++n) {
    const Vec3 i1 = gen.vec(2), i2 = gen.vec(2), v1 = gen.vec(50), v2 = gen.vec(50);
    const double a = gen.uniform(-3, 3);
    EXPECT_LE((xi(g, i1 + a * i2, v1 + a * v2) - (xi(g, i1, v1) + a * xi(g, i2, v2))).norm(),
              1e-11);
  }
}

TEST(Ctrl, SmoothSaturationShape) {
  const double delta = 2.0;
  Gen gen(42);
  for (int n = 0; n < 500; ++n) {
    const Vec3 x = gen.vec(1e3);
    const Vec3 s = sat_smooth(x, delta);
    EXPECT_LE(s.norm(), delta * (1 + 1e-15));
    EXPECT_LE(s.normalized().cross(x.normalized()).norm(), 1e-12);
  }
  const Vec3 small(1e-3, -2e-3, 5e-4);
  EXPECT_LE((sat_smooth(small, delta) - small).norm(), 1e-12 * small.norm());
  const Vec3 big(1e8, 0, 0);
  EXPECT_NEAR(sat_smooth(big, delta).x(), delta, 1e-12);
}

TEST(Ctrl, IntegralEquilibriumAndSmallSignal) {
  const CtrlGains g = default_gains();
  EXPECT_EQ(update_iv(g, Vec3::Zero(), Vec3::Zero(), 1e-3), Vec3::Zero());
  const Vec3 vt(0.01, -0.02, 0.005);
  EXPECT_LE((integral_rate(g, Vec3::Zero(), vt) - vt).norm(), 1e-9 * vt.norm());
}

TEST(Ctrl, IntegralStepMatchesFineIntegration) {
  const CtrlGains g = default_gains();
  const Vec3 vt(40, -10, 25);
  Vec3 fine(0.5, 0.2, -0.3);
  const Vec3 coarse = update_iv(g, fine, vt, 1e-3);
  for (int i = 0; i < 1000; ++i) fine += 1e-6 * integral_rate(g, fine, vt);
  EXPECT_LE((coarse - fine).norm(), 1e-6);
}

TEST(Ctrl, IntegralStaysBoundedUnderHugeError) {
  const CtrlGains g = default_gains();
  Vec3 iv = Vec3::Zero();
  const Vec3 vt(1e6, -1e6, 3e5);
  double worst = 0.0;
  for (int n = 0; n < 1000000; ++n) {
    iv = update_iv(g, iv, vt, 1e-3);
    worst = std::max(worst, iv.norm());
  }
  EXPECT_LE(worst, g.delta_sat * (1 + 1e-9));
  EXPECT_THROW(update_iv(g, iv, vt, 0.0), ContractViolation);
}

TEST(Ctrl, ApparentForceValues) {
  const CtrlEstimates est;
  const Vec3 hover = fp_bar(est, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), kG);
  EXPECT_LE((hover - Vec3(0, 0, 80 * kG)).norm(), 1e-12);

  CtrlEstimates no_drag = est;
  no_drag.ka = 0.0;
  const Vec3 ar(1, 2, 3), x(-0.5, 0.25, 2);
  EXPECT_LE((fp_bar(no_drag, Vec3(200, 10, 0), ar, x, kG) - 80 * (kG * Vec3::UnitZ() - ar - x))
                .norm(),
            1e-12);

  const Vec3 va(0.7 * plant::kMach, 0, 0);
  const Vec3 cruise = fp_bar(est, va, Vec3::Zero(), Vec3::Zero(), kG);
  EXPECT_NEAR(cruise.x(), -0.24 * 23.2 * 238.0 * 238.0, 1e-8);
  EXPECT_NEAR(cruise.z(), 80 * kG, 1e-12);
}

TEST(Ctrl, ReferenceDirection) {
  EXPECT_LE((kr_from_force(Vec3(0, 0, 981), 0.1).vec() - Vec3::UnitZ()).norm(), 1e-15);
  EXPECT_THROW(kr_from_force(Vec3::Zero(), 0.1), SingularReference);
  EXPECT_THROW(kr_from_force(Vec3(0.05, 0, 0), 0.1), SingularReference);
  Gen gen(43);
  for (int n = 0; n < 200; ++n) {
    const Vec3 f = gen.vec_with_norm(1, 1e4);
    const double s = gen.uniform(1e-3, 1e3);
    EXPECT_LE((kr_from_force(s * f, 1e-6).vec() - kr_from_force(f, 1e-6).vec()).norm(), 1e-15);
  }
}

TEST(Ctrl, ThrustCommandAndClamps) {
  const CtrlEstimates est;
  const CtrlGains g = default_gains();
  const double w = est.mass * kG;
  ThrustCommand t = thrust_cmd(est, g, Vec3(0, 0, w), Vec3::UnitZ(), kG);
  EXPECT_NEAR(t.thrust, w, 1e-12);
  EXPECT_FALSE(t.saturated);
  t = thrust_cmd(est, g, Vec3(0, 0, 50 * w), Vec3::UnitZ(), kG);
  EXPECT_EQ(t.thrust, 10 * w * (1 - 1e-9));
  EXPECT_TRUE(t.saturated);
  t = thrust_cmd(est, g, Vec3(0, 0, -w), Vec3::UnitZ(), kG);
  EXPECT_EQ(t.thrust, 1e-6 * w);
  EXPECT_GT(t.thrust, 0.0);
}

TEST(Ctrl, ThrustDifferenceBetweenModes) {
  const CtrlEstimates est;
  Gen gen(44);
  for (int n = 0; n < 2000; ++n) {
    const geom::Attitude att = gen.attitude();
    const Vec3 va = gen.vec_with_norm(1.0, 400.0);
    const Vec3 ar = gen.vec(5), x = gen.vec(5);
    const Vec3 k = att.k();
    const double cos_alpha = -va.dot(k) / va.norm();
    const double diff =
        fp_bar(est, va, ar, x, kG).dot(k) - fa_bar(est, va, att, ar, x, kG).dot(k);
    const double expect = 2 * est.c1 * est.ka * va.squaredNorm() * cos_alpha;
    EXPECT_NEAR(diff, expect, 1e-9 * (1 + std::abs(est.ka * est.cd0() * va.squaredNorm())));
  }
}

TEST(Ctrl, GammaValues) {
  const GammaPair z = gamma_and_dot(Vec3::Zero(), Vec3(1, 2, 3), 4.0);
  EXPECT_EQ(z.gamma, 2.0);
  EXPECT_EQ(z.gamma_dot, 0.0);
  const GammaPair s = gamma_and_dot(Vec3(3, 4, 0), Vec3::Zero(), 1.0);
  EXPECT_NEAR(s.gamma, std::sqrt(26.0), 1e-15);
  EXPECT_EQ(s.gamma_dot, 0.0);
  EXPECT_THROW(gamma_and_dot(Vec3::Zero(), Vec3::Zero(), 0.0), ContractViolation);
}

TEST(Ctrl, FeedforwardMatchesFiniteDifferences) {
  const CtrlEstimates est;
  const CtrlGains g = default_gains();
  const double h = 1e-4;
  for (double t = 40.3; t < 60.0; t += 0.71) {
    const Feedforward ff = feedforward_terms(est, g, sinusoid_reference(t), WindSample{}, kG);
    const Feedforward fp = feedforward_terms(est, g, sinusoid_reference(t + h), WindSample{}, kG);
    const Feedforward fm = feedforward_terms(est, g, sinusoid_reference(t - h), WindSample{}, kG);
    const double gamma_fd = (fp.gamma - fm.gamma) / (2 * h);
    EXPECT_LE(std::abs(gamma_fd - ff.gamma_dot), 1e-6 * std::max(1.0, std::abs(ff.gamma_dot)));
    const Vec3 kr_fd = (fp.kr.vec() - fm.kr.vec()) / (2 * h);
    EXPECT_LE((kr_fd - ff.kr_dot).norm(), 1e-5 * std::max(1e-3, ff.kr_dot.norm()));
    EXPECT_NEAR(ff.kr_dot.dot(ff.kr.vec()), 0.0, 1e-15);
    EXPECT_LE((ff.omega_r - ff.kr.vec().cross(ff.kr_dot)).norm(), 1e-15);
  }
}

TEST(Ctrl, FeedforwardWithWindMatchesFiniteDifferences) {
  const CtrlEstimates est;
  const CtrlGains g = default_gains();
  plant::WindProfile wind;
  wind.terms.push_back({Vec3(10, -5, 2), Vec3(0.7, 1.1, 0.3), Vec3(0.2, 0.0, 1.0)});
  auto wind_at = [&](double t) { return WindSample{wind.velocity(t), wind.acceleration(t)}; };
  const double h = 1e-4;
  for (double t = 41.0; t < 50.0; t += 1.3) {
    const Feedforward ff = feedforward_terms(est, g, sinusoid_reference(t), wind_at(t), kG);
    const Feedforward fp =
        feedforward_terms(est, g, sinusoid_reference(t + h), wind_at(t + h), kG);
    const Feedforward fm =
        feedforward_terms(est, g, sinusoid_reference(t - h), wind_at(t - h), kG);
    const Vec3 f_fd = (fp.fbar - fm.fbar) / (2 * h);
    EXPECT_LE((f_fd - ff.fbar_dot).norm(), 1e-6 * std::max(1.0, ff.fbar_dot.norm()));
  }
}

TEST(Ctrl, FeedforwardConstantAndJumpSteps) {
  const CtrlEstimates est;
  const CtrlGains g = default_gains();
  ReferenceSample r;
  r.vr = Vec3(238, 0, 0);
  Feedforward ff = feedforward_terms(est, g, r, WindSample{}, kG);
  EXPECT_EQ(ff.kr_dot, Vec3::Zero());
  EXPECT_EQ(ff.omega_r, Vec3::Zero());
  EXPECT_EQ(ff.gamma_dot, 0.0);

  r = sinusoid_reference(45.0);
  r.smooth = false;
  ff = feedforward_terms(est, g, r, WindSample{}, kG);
  EXPECT_EQ(ff.omega_r, Vec3::Zero());
  EXPECT_EQ(ff.gamma_dot, 0.0);

  // Reference that asks for exactly zero apparent force.
  ReferenceSample free_fall;
  free_fall.ar = Vec3(0, 0, kG);
  EXPECT_THROW(feedforward_terms(est, g, free_fall, WindSample{}, kG), SingularReference);
}

TEST(Ctrl, AngularVelocityLaw) {
  const CtrlGains g = default_gains();
  const Vec3 k = Vec3::UnitZ();
  EXPECT_EQ(omega_inertial(g, k, k, Vec3::Zero(), 0.0).omega, Vec3::Zero());

  const KinematicCommand perp = omega_inertial(g, k, Vec3::UnitX(), Vec3::Zero(), 0.0);
  EXPECT_NEAR(perp.k1, 10.0 / (1.01 * 1.01), 1e-12);
  EXPECT_NEAR(perp.omega.norm(), perp.k1, 1e-12);

  CtrlGains linear = g;
  linear.k1_power = 1;
  EXPECT_NEAR(k1_gain(linear, k, Vec3::UnitX()), 10.0 / 1.01, 1e-12);

  Gen gen(45);
  for (int n = 0; n < 5000; ++n) {
    const Vec3 kr = gen.unit();
    const Vec3 kk = gen.unit_away_from_antipode(kr, -0.999);
    const Vec3 wr = gen.vec(5.0);
    const KinematicCommand c = omega_inertial(g, kk, kr, wr, gen.uniform(-2, 2));
    EXPECT_LE(std::abs(c.omega.dot(kk)), 1e-12 * (1 + c.omega.norm()));
  }
  EXPECT_THROW(omega_inertial(g, k, -k, Vec3::Zero(), 0.0), AntipodalAttitude);
}

TEST(Ctrl, BodyRateClamp) {
  const CtrlGains g = default_gains();
  Gen gen(46);
  int saturated = 0;
  for (int n = 0; n < 2000; ++n) {
    const geom::Attitude att = gen.attitude();
    const UnitVec3 kr(gen.unit_away_from_antipode(att.k(), -0.99));
    const OmegaCommand c =
        omega_cmd(g, att, kr, gen.vec(20.0), gen.uniform(100, 1e4), gen.uniform(-1e4, 1e4));
    EXPECT_LE(c.omega_body.cwiseAbs().maxCoeff(), g.omega_max);
    const Vec3 body = att.matrix().transpose() * c.omega_inertial;
    if (c.saturated) {
      ++saturated;
    } else {
      EXPECT_LE((c.omega_body - body).norm(), 1e-12 * (1 + body.norm()));
    }
  }
  EXPECT_GT(saturated, 0);
}

TEST(Ctrl, LyapunovFunctionForms) {
  Gen gen(47);
  for (int n = 0; n < 1000; ++n) {
    const Vec3 kr = gen.unit();
    const Vec3 k = gen.unit_away_from_antipode(kr, -0.99);
    const double gamma = gen.uniform(1, 1e3);
    const double c = k.dot(kr);
    EXPECT_NEAR(lyapunov_v1(gamma, k, kr), 0.5 * gamma * gamma * (1 - c) / (1 + c),
                1e-9 * gamma * gamma);
  }
  EXPECT_EQ(lyapunov_v1(1.0, Vec3::UnitZ(), Vec3::UnitZ()), 0.0);
}

TEST(Ctrl, HoverEquilibrium) {
  const CtrlEstimates est;
  const Controller c(est, default_gains(), ControllerMode::fp);
  CtrlState cs;
  const ControllerOutput out = c.step(cs, plant::VehicleState{}, ReferenceSample{}, WindSample{}, 1e-3);
  EXPECT_NEAR(out.input.thrust, est.mass * kG, 1e-9);
  EXPECT_LE(out.input.omega_body.norm(), 1e-12);
  EXPECT_EQ(cs.iv, Vec3::Zero());
  EXPECT_NEAR(out.diag.theta_tilde, 0.0, 1e-12);
}

TEST(Ctrl, InitialAngleOfAttackOfMissileCase) {
  const Controller c(CtrlEstimates{}, default_gains(), ControllerMode::fp);
  plant::VehicleState s;
  s.v = Vec3(0.5 * plant::kMach, 0, 0);
  s.att = geom::Attitude::from_euler(0.0, geom::deg2rad(-40.0), 0.0);
  ReferenceSample r;
  r.vr = Vec3(0.7 * plant::kMach, 0, 0);
  const ControllerOutput out = c.evaluate(s, Vec3::Zero(), r, WindSample{});
  EXPECT_NEAR(geom::rad2deg(out.diag.alpha), 50.0, 1e-9);
  EXPECT_GT(out.diag.theta_tilde, 0.0);
}

TEST(Ctrl, ModesPickTheirForce) {
  const CtrlEstimates est;
  const CtrlGains g = default_gains();
  Gen gen(48);
  for (int n = 0; n < 200; ++n) {
    plant::VehicleState s;
    s.v = gen.vec_with_norm(10, 300);
    s.att = gen.attitude();
    const Vec3 iv = gen.vec(1.0);
    ReferenceSample r;
    r.vr = gen.vec(200);
    const Vec3 x = xi(g, iv, s.v - r.vr);
    const Vec3 fp = fp_bar(est, s.v, r.ar, x, kG);
    const Vec3 fa = fa_bar(est, s.v, s.att, r.ar, x, kG);
    try {
      const ControllerOutput op = Controller(est, g, ControllerMode::fp).evaluate(s, iv, r, {});
      EXPECT_LE((op.diag.kr - fp.normalized()).norm(), 1e-12);
      EXPECT_NEAR(op.diag.fbar_norm, fp.norm(), 1e-9 * fp.norm());
    } catch (const AntipodalAttitude&) {
    }
    try {
      const ControllerOutput oa = Controller(est, g, ControllerMode::fa).evaluate(s, iv, r, {});
      EXPECT_LE((oa.diag.kr - fa.normalized()).norm(), 1e-12);
      EXPECT_NEAR(oa.diag.fbar_norm, fa.norm(), 1e-9 * fa.norm());
      EXPECT_NEAR(oa.diag.eps_norm, fa.norm() * std::sin(oa.diag.theta_tilde),
                  1e-9 * fa.norm());
    } catch (const AntipodalAttitude&) {
    }
  }
}

TEST(Ctrl, ValidationRejectsBadConfig) {
  CtrlGains g = default_gains();
  g.kv = 0;
  EXPECT_THROW(g.validate(), ContractViolation);
  g = default_gains();
  g.k1_power = 3;
  EXPECT_THROW(g.validate(), ContractViolation);
  g = CtrlGains{};
  EXPECT_THROW(g.validate(), ContractViolation);
  CtrlEstimates e;
  e.c0 = 0;
  e.c1 = 0;
  EXPECT_THROW(e.validate(), ContractViolation);
  EXPECT_THROW(Controller(CtrlEstimates{}, default_gains(), ControllerMode::fp, 0.0),
               ContractViolation);
}

}  // namespace
}  // namespace thrustdir::ctrl
