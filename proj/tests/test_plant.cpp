#include <gtest/gtest.h>

#include <cmath>

#include "gen.hpp"
#include "thrustdir/errors.hpp"
#include "thrustdir/plant.hpp"

namespace thrustdir::plant {
namespace {

using geom::kPi;
using testgen::Gen;

VehicleParams no_aero() {
  VehicleParams p;
  p.truth_aero = aero::TrigCoeffModel{0.0, 0.0};
  return p;
}

TEST(Plant, HoverEquilibrium) {
  const VehicleParams p;
  const VehicleState s{};
  const StateDerivative d = state_derivative(p, s, ControlInput{p.mass * p.gravity, Vec3::Zero()}, 0.0);
  EXPECT_LE(d.dv.norm(), 1e-12);
  EXPECT_EQ(d.dp, Vec3::Zero());
}

TEST(Plant, FreeFall) {
  const VehicleParams p;
  const StateDerivative d = state_derivative(p, VehicleState{}, ControlInput{}, 0.0);
  EXPECT_EQ(d.dv, Vec3(0, 0, kGravity));
}

TEST(Plant, AeroForceMatchesAeroModule) {
  const VehicleParams p;
  VehicleState s;
  s.v = Vec3(238, 0, 0);
  s.att = geom::Attitude::from_euler(0.0, geom::deg2rad(-90.0), 0.0);
  const Vec3 va_body = geom::rotate_inertial_to_body(s.att, s.v);
  const Vec3 expect = geom::rotate_body_to_inertial(
      s.att, aero::force_generic(p.truth_aero, aero::AeroEnv{p.ka, Vec3::Zero()}, va_body));
  const StateDerivative d = state_derivative(p, s, ControlInput{}, 0.0);
  EXPECT_LE((d.dv - (kGravity * Vec3::UnitZ() + expect / p.mass)).norm(), 1e-12);
  EXPECT_LE((aero_force(p, s, 0.0) - expect).norm(), 1e-9);
}

TEST(Plant, BallisticArcIsExact) {
  const VehicleParams p = no_aero();
  VehicleState s;
  s.v = Vec3(30, -4, -50);
  const Vec3 v0 = s.v;
  const double dt = 1e-3;
  for (int n = 0; n < 3000; ++n) s = step(p, s, ControlInput{}, n * dt, dt);
  EXPECT_NEAR(s.v.z(), v0.z() + kGravity * 3.0, 1e-9 * std::abs(v0.z()));
  EXPECT_NEAR(s.p.z(), v0.z() * 3.0 + 0.5 * kGravity * 9.0, 1e-8);
  EXPECT_NEAR(s.p.x(), 90.0, 1e-9);
}

TEST(Plant, ConstantSpinReturnsToStart) {
  const VehicleParams p = no_aero();
  VehicleState s;
  s.att = geom::Attitude::from_euler(0.3, -0.2, 0.1);
  const geom::Mat3 start = s.att.matrix();
  const double dt = 1e-3;
  for (int n = 0; n < 2000; ++n) s = step(p, s, ControlInput{0.0, Vec3(0, 0, kPi)}, n * dt, dt);
  EXPECT_LE((s.att.matrix() - start).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Plant, SphereDragSlowsHorizontalMotion) {
  VehicleParams p;
  p.truth_aero = aero::TrigCoeffModel{0.5, 0.0};
  VehicleState s;
  s.v = Vec3(200, 50, 0);
  double prev = s.v.head<2>().norm();
  for (int n = 0; n < 2000; ++n) {
    s = step(p, s, ControlInput{}, n * 1e-3, 1e-3);
    const double h = s.v.head<2>().norm();
    ASSERT_LT(h, prev);
    prev = h;
  }
}

TEST(Plant, Deterministic) {
  const VehicleParams p;
  Gen gen(31);
  VehicleState a, b;
  a.v = b.v = Vec3(100, 20, -10);
  for (int n = 0; n < 500; ++n) {
    const ControlInput u{gen.uniform(0, 2000), gen.vec(2.0)};
    a = step(p, a, u, n * 1e-3, 1e-3);
    b = step(p, b, u, n * 1e-3, 1e-3);
  }
  EXPECT_EQ(a.p, b.p);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.att.matrix(), b.att.matrix());
}

TEST(Plant, WindEntersOnlyThroughAirVelocity) {
  const Vec3 wind(20, -15, 5);
  VehicleParams calm;
  VehicleParams windy;
  windy.wind.constant = wind;
  VehicleState a, b;
  a.v = Vec3(150, 10, -30);
  b.v = a.v + wind;
  a.att = b.att = geom::Attitude::from_euler(0.1, -0.6, 0.2);
  Gen gen(32);
  for (int n = 0; n < 1000; ++n) {
    const ControlInput u{gen.uniform(500, 1500), gen.vec(1.0)};
    a = step(calm, a, u, n * 1e-3, 1e-3);
    b = step(windy, b, u, n * 1e-3, 1e-3);
    const Vec3 va_a = geom::rotate_inertial_to_body(a.att, a.v);
    const Vec3 va_b = geom::rotate_inertial_to_body(b.att, b.v - wind);
    ASSERT_LE((va_a - va_b).norm(), 1e-9 * va_a.norm());
  }
}

TEST(Plant, WindDerivativesMatchFiniteDifferences) {
  WindProfile w;
  w.constant = Vec3(1, 2, 3);
  w.terms.push_back({Vec3(3, 0, 1), Vec3(0.5, 0.0, 2.0), Vec3(0.1, 0.0, -1.0)});
  w.terms.push_back({Vec3(0, 2, 0), Vec3(0.0, 1.5, 0.0), Vec3(0.0, 0.4, 0.0)});
  const double h = 1e-5;
  for (double t = 0.0; t < 5.0; t += 0.37) {
    const Vec3 a_fd = (w.velocity(t + h) - w.velocity(t - h)) / (2 * h);
    const Vec3 j_fd = (w.acceleration(t + h) - w.acceleration(t - h)) / (2 * h);
    EXPECT_LE((a_fd - w.acceleration(t)).norm(), 1e-8);
    EXPECT_LE((j_fd - w.jerk(t)).norm(), 1e-8);
  }
}

// Open-loop step halving on the nonlinear model with lift, drag and rotation.
TEST(Plant, FourthOrderConvergence) {
  const VehicleParams p;
  VehicleState s0;
  s0.v = Vec3(170, 0, 0);
  s0.att = geom::Attitude::from_euler(0.0, geom::deg2rad(-40.0), 0.0);
  const ControlInput u{1500.0, Vec3(0.3, -0.4, 0.2)};
  auto integrate = [&](double dt) {
    VehicleState s = s0;
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < n; ++i) s = step(p, s, u, i * dt, dt);
    return s.v;
  };
  const Vec3 ref = integrate(1e-4);
  const double e1 = (integrate(0.02) - ref).norm();
  const double e2 = (integrate(0.01) - ref).norm();
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Plant, RejectsBadInputs) {
  const VehicleParams p;
  EXPECT_THROW(step(p, VehicleState{}, ControlInput{}, 0.0, 0.0), ContractViolation);
  EXPECT_THROW(step(p, VehicleState{}, ControlInput{std::nan(""), Vec3::Zero()}, 0.0, 1e-3),
               ContractViolation);
  EXPECT_THROW(step(p, VehicleState{}, ControlInput{1e308, Vec3::Zero()}, 0.0, 1e3),
               NonFiniteState);
  VehicleParams bad;
  bad.mass = 0.0;
  EXPECT_THROW(bad.validate(), ContractViolation);
}

}  // namespace
}  // namespace thrustdir::plant
