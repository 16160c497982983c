#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "thrustdir/aero.hpp"
#include "thrustdir/errors.hpp"

namespace thrustdir::aero {

namespace {

struct Weights {
  std::vector<double> drag;
  std::vector<double> lift;
};

TrigCoeffModel solve_normal_equations(std::span<const CoeffSample> samples,
                                      const Weights& w) {
  Eigen::Matrix2d n = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double s = std::sin(samples[i].alpha);
    const Eigen::Vector2d drag_row(1.0, 2.0 * s * s);
    const Eigen::Vector2d lift_row(0.0, std::sin(2.0 * samples[i].alpha));
    n += w.drag[i] * drag_row * drag_row.transpose() +
         w.lift[i] * lift_row * lift_row.transpose();
    b += w.drag[i] * samples[i].cd * drag_row + w.lift[i] * samples[i].cl * lift_row;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(n);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo <= 1e-12 * hi) {
    throw DegenerateFit("normal equations are singular: (c0, c1) not observable");
  }
  const Eigen::Vector2d x = n.ldlt().solve(b);
  return {x(0), x(1)};
}

}  // namespace

FitReport fit_trig_model(std::span<const CoeffSample> samples,
                         const FitOptions& options) {
  std::set<double> distinct;
  for (const auto& s : samples) {
    if (!std::isfinite(s.alpha) || !std::isfinite(s.cl) || !std::isfinite(s.cd)) {
      throw ContractViolation("non-finite coefficient sample");
    }
    distinct.insert(s.alpha);
  }
  if (distinct.size() < 2) {
    throw DegenerateFit("fit needs at least two samples with distinct alpha");
  }
  if (!(options.drag_weight > 0.0) || !(options.lift_weight > 0.0)) {
    throw ContractViolation("fit channel weights must be positive");
  }

  const std::size_t n = samples.size();
  Weights w{std::vector<double>(n, options.drag_weight),
            std::vector<double>(n, options.lift_weight)};
  TrigCoeffModel model = solve_normal_equations(samples, w);
  int iterations = 1;

  if (options.weighting == FitWeighting::relative) {
    double cd_scale = 0.0;
    double cl_scale = 0.0;
    for (const auto& s : samples) {
      cd_scale = std::max(cd_scale, std::abs(s.cd));
      cl_scale = std::max(cl_scale, std::abs(s.cl));
    }
    // Floors keep the weights bounded where the model crosses zero.
    const double cd_floor = std::max(1e-6 * cd_scale, 1e-300);
    const double cl_floor = std::max(1e-6 * cl_scale, 1e-300);
    for (; iterations < options.max_iterations; ++iterations) {
      for (std::size_t i = 0; i < n; ++i) {
        const double cd = std::max(std::abs(model.cd(samples[i].alpha)), cd_floor);
        const double cl = std::max(std::abs(model.cl(samples[i].alpha)), cl_floor);
        w.drag[i] = options.drag_weight / (cd * cd);
        w.lift[i] = options.lift_weight / (cl * cl);
      }
      const TrigCoeffModel next = solve_normal_equations(samples, w);
      const double change = std::abs(next.c0 - model.c0) + std::abs(next.c1 - model.c1);
      model = next;
      if (change <= 1e-14 * (std::abs(model.c0) + std::abs(model.c1))) {
        ++iterations;
        break;
      }
    }
  }

  FitReport rep;
  rep.model = model;
  rep.iterations = iterations;
  double ss_cd = 0.0;
  double ss_cl = 0.0;
  std::vector<double> raw;
  for (const auto& s : samples) {
    const double rd = s.cd - model.cd(s.alpha);
    const double rl = s.cl - model.cl(s.alpha);
    ss_cd += rd * rd;
    ss_cl += rl * rl;
    if (s.alpha >= geom::deg2rad(5.0) - 1e-12 &&
        s.alpha <= geom::deg2rad(175.0) + 1e-12) {
      raw.push_back(s.cd + s.cl / std::tan(s.alpha));
    }
  }
  rep.rms_cd = std::sqrt(ss_cd / static_cast<double>(n));
  rep.rms_cl = std::sqrt(ss_cl / static_cast<double>(n));
  if (!raw.empty()) {
    double sum = 0.0;
    for (const double v : raw) sum += v;
    rep.raw_cd0_estimate = sum / static_cast<double>(raw.size());
    for (const double v : raw) {
      rep.raw_compat_residual =
          std::max(rep.raw_compat_residual, std::abs(v - rep.raw_cd0_estimate));
    }
    rep.raw_compat_points = raw.size();
  }
  return rep;
}

std::string format_fit_report(const FitReport& report) {
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "# trig coefficient fit\n"
                "c0 = %.12g\n"
                "c1 = %.12g\n"
                "cd0 = %.12g\n"
                "rms_cd = %.6g\n"
                "rms_cl = %.6g\n"
                "raw_compat_residual = %.6g\n"
                "raw_compat_cd0 = %.6g\n"
                "raw_compat_points = %zu\n"
                "iterations = %d\n",
                report.model.c0, report.model.c1, report.model.cd0(),
                report.rms_cd, report.rms_cl, report.raw_compat_residual,
                report.raw_cd0_estimate, report.raw_compat_points,
                report.iterations);
  return buf;
}

}  // namespace thrustdir::aero
