// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gen.hpp"
#include "thrustdir/aero.hpp"
#include "thrustdir/cli.hpp"
#include "thrustdir/sim.hpp"

using namespace thrustdir;
using geom::Vec3;
using testgen::Gen;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs shared between criteria, filled on first use.
struct Runs {
  sim::RunResult fig4;
  sim::RunResult fig5;
  sim::RunResult fig5_guard_free;
  double fig4_seconds = 0.0;
  double fig5_seconds = 0.0;
  std::vector<std::pair<std::string, sim::RunResult>> closed_loop;
  double mass_ratio = 1.0;  // m / m_hat for the missile presets
};

Runs& runs() {
  static Runs r = [] {
    Runs out;
    const sim::Scenario fig4 = cli::to_scenario(cli::preset("c701-fig4"));
    auto t0 = std::chrono::steady_clock::now();
    out.fig4 = sim::run(fig4);
    out.fig4_seconds = seconds_since(t0);

    const sim::Scenario fig5 = cli::to_scenario(cli::preset("c701-fig5"));
    t0 = std::chrono::steady_clock::now();
    out.fig5 = sim::run(fig5);
    out.fig5_seconds = seconds_since(t0);

    sim::Scenario guard_free = fig5;
    guard_free.gains.antipodal_margin = 0.0;
    out.fig5_guard_free = sim::run(guard_free);

    out.mass_ratio = fig4.vehicle.mass / fig4.estimates.mass;
    return out;
  }();
  return r;
}

double error_norm(const sim::TraceRow& row) { return (row.v - row.vr).norm(); }

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const aero::TrigCoeffModel m : {aero::TrigCoeffModel{0.43, 0.462},
                                       aero::TrigCoeffModel{0.1, 11.55}}) {
    for (int deg = 1; deg <= 179; ++deg) {
      const double a = geom::deg2rad(deg);
      worst = std::max(worst, std::abs(m.cd(a) + m.cl(a) / std::tan(a) - m.cd0()));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 1e-3,
          "max residual " + fmt("%.3g", worst) + ", runtime " + fmt("%.3g", secs * 1e3) + " ms"};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  Gen gen(2024);
  const aero::TrigCoeffModel model{0.1, 11.55};
  const double ka = 0.3;
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const Vec3 va = gen.vec_with_norm(0.0, 400.0);
    const geom::Attitude att = gen.attitude();
    const double thrust = gen.uniform(0.0, 1e4);
    const Vec3 k = att.k();
    const Vec3 fa = aero::force_inertial(model, ka, va, att);
    const aero::SphericalEquivalent eq = aero::spherical_equivalence(
        model, aero::AeroEnv{ka, Vec3::Zero()}, geom::rotate_inertial_to_body(att, va), thrust);
    const Vec3 fp = aero::equivalent_drag(ka, model.cd0(), va);
    const double r = ((fa - thrust * k) - (fp - eq.tp * k)).norm() / (1.0 + fa.norm());
    worst = std::max(worst, r);
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 1.0,
          "max relative mismatch " + fmt("%.3g", worst) + " over 1e4 states, runtime " +
              fmt("%.3g", secs) + " s"};
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  Gen gen(3);
  std::size_t violations = 0, failed = 0;
  double worst_theta = 0.0, worst_growth = 0.0;
  for (int n = 0; n < 100; ++n) {
    const Vec3 kr0 = gen.unit();
    const Vec3 k0 = gen.unit_away_from_antipode(kr0, -0.99);
    const Vec3 axis = gen.unit();
    for (const bool moving : {false, true}) {
      sim::KinematicScenario ks;
      ks.k0 = k0;
      ks.kr0 = kr0;
      if (moving) {
        ks.kr_axis = axis;
        ks.kr_amplitude = geom::deg2rad(30.0);
        ks.kr_omega = 1.0;
        ks.gamma_amplitude = 0.3;
        ks.gamma_omega = 2.0;
      }
      const sim::RunResult r = sim::run_kinematic(ks);
      if (r.termination.kind != sim::TerminationKind::completed) {
        ++failed;
        continue;
      }
      violations += r.monitors.lyapunov.decay_violations;
      worst_growth = std::max(worst_growth, r.monitors.lyapunov.max_growth_ratio);
      worst_theta = std::max(worst_theta, r.trace.back().theta_tilde_deg);
    }
  }
  const double secs = seconds_since(t0);
  return {failed == 0 && violations == 0 && worst_theta < 0.1 && secs < 5.0,
          std::to_string(failed) + " aborted, " + std::to_string(violations) +
              " decay violations, max growth ratio " + fmt("%.6f", worst_growth) +
              ", max theta(5 s) " + fmt("%.3g", worst_theta) + " deg, runtime " +
              fmt("%.3g", secs) + " s"};
}

Outcome criterion4() {
  const Runs& r = runs();
  const sim::RunResult& res = r.fig4;
  const bool completed = res.termination.kind == sim::TerminationKind::completed &&
                         std::abs(res.t_final - 60.0) < 1e-9;
  const double alpha0 = res.trace.front().alpha_deg;
  double t_alpha = -1.0;
  for (const sim::TraceRow& row : res.trace) {
    if (row.alpha_deg < 10.0) {
      t_alpha = row.t;
      break;
    }
  }
  double worst_terminal = 0.0;
  for (const sim::SegmentStats& s : res.monitors.segments) {
    if (s.kind == sim::ReferenceSegment::Kind::constant) {
      worst_terminal = std::max(worst_terminal, s.terminal_error);
    }
  }
  double late = 0.0;
  for (const sim::TraceRow& row : res.trace) {
    if (row.t >= 50.0) late = std::max(late, error_norm(row));
  }
  const double min_f = res.monitors.min_fbar_over_mg;

  const bool ok_alpha0 = std::abs(alpha0 - 50.0) <= 0.5;
  const bool ok_alpha = t_alpha >= 0.0 && t_alpha <= 3.0;
  const bool ok_terminal = worst_terminal < 0.01;
  const bool ok_late = late < 0.05;
  const bool ok_force = min_f > 0.1;
  const bool ok_time = r.fig4_seconds < 10.0;
  auto mark = [](bool b) { return b ? "ok" : "FAILED"; };
  return {completed && ok_alpha0 && ok_alpha && ok_terminal && ok_late && ok_force && ok_time,
          std::string("completed ") + mark(completed) + "; alpha(0) " + fmt("%.3f", alpha0) +
              " deg " + mark(ok_alpha0) + "; alpha < 10 deg at " + fmt("%.2f", t_alpha) +
              " s " + mark(ok_alpha) + "; max terminal error " + fmt("%.2e", worst_terminal) +
              " Mach " + mark(ok_terminal) + "; max error on [50, 60] " + fmt("%.4f", late) +
              " Mach " + mark(ok_late) + "; min |Fbar|/mg " + fmt("%.3f", min_f) + " " +
              mark(ok_force) + "; runtime " + fmt("%.2f", r.fig4_seconds) + " s " +
              mark(ok_time)};
}

double peak_theta(const std::vector<sim::TraceRow>& trace, double t0, double t1) {
  double peak = 0.0;
  for (const sim::TraceRow& row : trace) {
    if (row.t >= t0 && row.t < t1) peak = std::max(peak, row.theta_tilde_deg);
  }
  return peak;
}

Outcome criterion5() {
  const Runs& r = runs();
  const sim::RunResult& fa = r.fig5;
  const double t_star = fa.termination.t;
  const bool ok_kind = fa.termination.kind == sim::TerminationKind::singular_reference;
  const bool ok_time = t_star > 40.0 && t_star < 45.0;

  std::string peaks;
  bool ok_peaks = true;
  for (const double jump : {10.0, 20.0, 30.0, 40.0}) {
    if (jump >= t_star) break;
    const double end = std::min(jump + 10.0, t_star);
    const double p_fa = peak_theta(fa.trace, jump, end);
    const double p_fp = peak_theta(r.fig4.trace, jump, end);
    ok_peaks = ok_peaks && p_fa > p_fp;
    peaks += fmt(" t=%.0f:", jump) + fmt(" fa %.1f", p_fa) + fmt(" / fp %.1f deg;", p_fp);
  }
  return {ok_kind && ok_time && ok_peaks && r.fig5_seconds < 10.0,
          std::string("termination ") + sim::to_string(fa.termination.kind) + " at " +
              fmt("%.4f", t_star) + " s; peaks after jumps" + peaks + " runtime " +
              fmt("%.2f", r.fig5_seconds) + " s"};
}

Outcome criterion6() {
  const sim::LyapunovReport& lyap = runs().fig4.monitors.lyapunov;
  return {lyap.eps_rows_checked == runs().fig4.trace.size() && lyap.eps_violations == 0,
          std::to_string(lyap.eps_rows_checked) + " rows, " +
              std::to_string(lyap.eps_violations) + " violations, max m|eps|/sqrt(8 V1) " +
              fmt("%.6f", lyap.max_eps_ratio)};
}

std::vector<aero::CoeffSample> samples(const aero::TrigCoeffModel& m, int points) {
  std::vector<aero::CoeffSample> s;
  for (int i = 0; i < points; ++i) {
    const double a = geom::deg2rad(90.0 * i / (points - 1));
    s.push_back({a, m.cl(a), m.cd(a)});
  }
  return s;
}

Outcome criterion7() {
  double exact_err = 0.0;
  for (const aero::TrigCoeffModel m : {aero::TrigCoeffModel{0.43, 0.462},
                                       aero::TrigCoeffModel{0.1, 11.55}}) {
    const aero::FitReport rep = aero::fit_trig_model(samples(m, 19));
    exact_err = std::max({exact_err, std::abs(rep.model.c0 - m.c0), std::abs(rep.model.c1 - m.c1)});
  }
  const aero::TrigCoeffModel truth{0.1, 11.55};
  std::vector<double> rel;
  for (int seed = 0; seed < 100; ++seed) {
    Gen gen(7000 + seed);
    std::vector<aero::CoeffSample> s = samples(truth, 19);
    for (aero::CoeffSample& x : s) {
      x.cd *= 1.0 + 0.05 * gen.normal();
      x.cl *= 1.0 + 0.05 * gen.normal();
    }
    aero::FitOptions opts;
    opts.weighting = aero::FitWeighting::relative;
    const aero::FitReport rep = aero::fit_trig_model(s, opts);
    rel.push_back(std::max(std::abs(rep.model.c0 / truth.c0 - 1.0),
                           std::abs(rep.model.c1 / truth.c1 - 1.0)));
  }
  std::sort(rel.begin(), rel.end());
  const double p95 = rel[94];
  return {exact_err <= 1e-10 && p95 <= 0.10,
          "noiseless error " + fmt("%.3g", exact_err) + "; 5% noise, 95th percentile relative error " +
              fmt("%.4f", p95)};
}

sim::Scenario order_scenario(double dt) {
  sim::Scenario sc;
  sc.duration = 5.0;
  sc.dt = dt;
  sc.decimation = 1;
  sc.reference = sim::constant_reference(Vec3(0.7 * plant::kMach, 0, 0), 5.0);
  sc.initial.v0 = Vec3(0.68 * plant::kMach, 0, 0.02 * plant::kMach);
  sc.initial.euler0 = Vec3(0.1, geom::deg2rad(-85.0), 0.05);
  return sc;
}

double state_error(const sim::RunResult& a, const sim::RunResult& ref) {
  return (a.final_state.v - ref.final_state.v).norm() +
         (a.final_state.p - ref.final_state.p).norm() +
         1e3 * (a.final_state.att.matrix() - ref.final_state.att.matrix()).norm();
}

Outcome criterion8() {
  const sim::RunResult ref = sim::run(order_scenario(1e-5));
  const sim::RunResult coarse = sim::run(order_scenario(1e-2));
  const sim::RunResult fine = sim::run(order_scenario(5e-3));
  Runs& r = runs();
  r.closed_loop.push_back({"order dt=1e-2", coarse});
  r.closed_loop.push_back({"order dt=5e-3", fine});
  const double e1 = state_error(coarse, ref);
  const double e2 = state_error(fine, ref);
  const double ratio = e1 / e2;
  return {ref.termination.kind == sim::TerminationKind::completed && ratio >= 12.0 &&
              ratio <= 20.0,
          "error(dt=1e-2) " + fmt("%.3e", e1) + ", error(dt=5e-3) " + fmt("%.3e", e2) +
              ", ratio " + fmt("%.2f", ratio)};
}

Outcome criterion9() {
  Runs& r = runs();
  const sim::Scenario hover = cli::to_scenario(cli::preset("hover"));
  std::vector<std::pair<std::string, const sim::RunResult*>> all{
      {"c701-fig4", &r.fig4}, {"c701-fig5", &r.fig5}};
  const sim::RunResult hover_run = sim::run(hover);
  all.push_back({"hover", &hover_run});
  for (const auto& [name, res] : r.closed_loop) all.push_back({name, &res});

  std::size_t rows = 0, bad = 0;
  double t_min = 1e300, t_max = 0.0, w_max = 0.0;
  for (const auto& [name, res] : all) {
    const double ratio = name == "hover" ? hover.vehicle.mass / hover.estimates.mass
                         : name.rfind("order", 0) == 0
                             ? order_scenario(1.0).vehicle.mass / order_scenario(1.0).estimates.mass
                             : r.mass_ratio;
    for (const sim::TraceRow& row : res->trace) {
      ++rows;
      const double t_hat = row.T_over_mg * ratio;
      const double w = row.omega.cwiseAbs().maxCoeff();
      t_min = std::min(t_min, t_hat);
      t_max = std::max(t_max, t_hat);
      w_max = std::max(w_max, w);
      if (!(t_hat > 0.0 && t_hat < 10.0 && w <= 2.0 * geom::kPi)) ++bad;
    }
  }
  return {bad == 0 && rows > 0,
          std::to_string(rows) + " rows over " + std::to_string(all.size()) + " runs, T/(m_hat g) in [" +
              fmt("%.3g", t_min) + ", " + fmt("%.4g", t_max) + "], max |omega_i| " +
              fmt("%.6f", w_max) + " rad/s, " + std::to_string(bad) + " out of bounds"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"compatibility identity", criterion1},
      {"spherical equivalence", criterion2},
      {"thrust-direction loop decay", criterion3},
      {"missile run, equivalent-drag controller", criterion4},
      {"missile run, raw-force controller", criterion5},
      {"perturbation bound", criterion6},
      {"coefficient fit recovery", criterion7},
      {"integrator order", criterion8},
      {"saturation contracts", criterion9},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %d %s: %s (%s)\n", index++, o.pass ? "PASS" : "FAIL", name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  const sim::Termination& gf = runs().fig5_guard_free.termination;
  std::printf("info: raw-force run without the antipodal guard ends with %s at %.4f s\n",
              sim::to_string(gf.kind), gf.t);
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
