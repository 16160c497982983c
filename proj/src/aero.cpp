#include "thrustdir/aero.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thrustdir/errors.hpp"

namespace thrustdir::aero {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

double TrigCoeffModel::cd(double alpha) const {
  const double s = std::sin(alpha);
  return c0 + 2.0 * c1 * s * s;
}

double TrigCoeffModel::cl(double alpha) const {
  return c1 * std::sin(2.0 * alpha);
}

TableCoeffModel::TableCoeffModel(std::vector<double> alpha_deg,
                                 std::vector<double> cl, std::vector<double> cd,
                                 Symmetry symmetry)
    : alpha_deg_(std::move(alpha_deg)),
      cl_(std::move(cl)),
      cd_(std::move(cd)),
      symmetry_(symmetry) {
  if (alpha_deg_.size() < 2 || alpha_deg_.size() != cl_.size() ||
      alpha_deg_.size() != cd_.size()) {
    throw ConfigError("coefficient table needs >= 2 rows of equal length");
  }
  for (std::size_t i = 0; i < alpha_deg_.size(); ++i) {
    if (!std::isfinite(alpha_deg_[i]) || !std::isfinite(cl_[i]) ||
        !std::isfinite(cd_[i])) {
      throw ConfigError("coefficient table has non-finite entry at row " +
                        std::to_string(i + 1));
    }
    if (cd_[i] < 0.0) {
      throw ConfigError("negative drag coefficient at row " +
                        std::to_string(i + 1));
    }
    if (i > 0 && !(alpha_deg_[i] > alpha_deg_[i - 1])) {
      throw ConfigError("alpha_deg not strictly ascending at row " +
                        std::to_string(i + 1));
    }
  }
  if (alpha_deg_.front() < 0.0 || alpha_deg_.back() > 180.0) {
    throw ConfigError("alpha_deg must lie in [0, 180]");
  }
}

double TableCoeffModel::interp(const std::vector<double>& xs,
                               const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto i = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

std::pair<double, double> TableCoeffModel::fold(double alpha) const {
  double deg = geom::rad2deg(alpha);
  double lift_sign = 1.0;
  if (symmetry_ == Symmetry::bisymmetric) {
    deg = std::fmod(deg, 180.0);
    if (deg < 0.0) deg += 180.0;
    if (alpha_deg_.back() <= 90.0 && deg > 90.0) {
      deg = 180.0 - deg;
      lift_sign = -1.0;
    }
  }
  return {deg, lift_sign};
}

double TableCoeffModel::cd(double alpha) const {
  return interp(alpha_deg_, cd_, fold(alpha).first);
}

double TableCoeffModel::cl(double alpha) const {
  const auto [deg, sign] = fold(alpha);
  return sign * interp(alpha_deg_, cl_, deg);
}

double drag_coefficient(const CoeffModel& model, double alpha) {
  return std::visit([alpha](const auto& m) { return m.cd(alpha); }, model);
}

double lift_coefficient(const CoeffModel& model, double alpha) {
  return std::visit([alpha](const auto& m) { return m.cl(alpha); }, model);
}

AeroAngles aero_angles(const Vec3& v_air_body) {
  geom::require_finite(v_air_body, "air velocity");
  const double speed = v_air_body.norm();
  if (speed < kMinAirspeed) {
    throw ZeroAirspeed("air speed below 1e-9 m/s");
  }
  AeroAngles out;
  out.alpha = std::acos(std::clamp(-v_air_body.z() / speed, -1.0, 1.0));
  out.valid_beta = std::sin(out.alpha) >= 1e-9;
  out.beta = out.valid_beta ? std::atan2(v_air_body.y(), v_air_body.x()) : 0.0;
  return out;
}

Vec3 air_velocity_from_angles(double alpha, double beta, double speed) {
  return {speed * std::sin(alpha) * std::cos(beta),
          speed * std::sin(alpha) * std::sin(beta),
          -speed * std::cos(alpha)};
}

Vec3 force_generic(const CoeffModel& model, const AeroEnv& env,
                   const Vec3& v_air_body) {
  const AeroAngles ang = aero_angles(v_air_body);
  const double speed = v_air_body.norm();
  const double sa = std::sin(ang.alpha);
  const double ca = std::cos(ang.alpha);
  const double cd = drag_coefficient(model, ang.alpha);

  double along_va = 0.0;  // C_D + C_L cot(alpha)
  double along_k = 0.0;   // C_L / sin(alpha)
  if (sa >= kAxisSinAlpha) {
    const double cl = lift_coefficient(model, ang.alpha);
    along_va = cd + cl * ca / sa;
    along_k = cl / sa;
  } else {
    std::visit(Overloaded{
                   [&](const TrigCoeffModel& m) {
                     along_va = cd + 2.0 * m.c1 * ca * ca;
                     along_k = 2.0 * m.c1 * ca;
                   },
                   [&](const TableCoeffModel&) { along_va = cd; },
               },
               model);
  }
  const Vec3 k = Vec3::UnitZ();
  return -env.ka * speed * (along_va * v_air_body + along_k * speed * k);
}

Vec3 force_inertial(const CoeffModel& model, double ka, const Vec3& v_air,
                    const geom::Attitude& att) {
  if (v_air.norm() < kMinAirspeed) {
    return Vec3::Zero();
  }
  const Vec3 v_body = geom::rotate_inertial_to_body(att, v_air);
  return att.matrix() * force_generic(model, AeroEnv{ka, Vec3::Zero()}, v_body);
}

CompatibilityReport check_compatibility(const CoeffModel& model,
                                        std::span<const double> alpha_grid) {
  CompatibilityReport rep;
  if (alpha_grid.empty()) return rep;
  std::vector<double> values;
  values.reserve(alpha_grid.size());
  for (const double a : alpha_grid) {
    if (!(a > 0.0 && a < geom::kPi)) {
      throw ContractViolation("compatibility grid must lie inside (0, pi)");
    }
    values.push_back(drag_coefficient(model, a) +
                     lift_coefficient(model, a) / std::tan(a));
  }
  double sum = 0.0;
  for (const double v : values) sum += v;
  rep.cd0_estimate = sum / static_cast<double>(values.size());
  for (const double v : values) {
    rep.max_residual = std::max(rep.max_residual, std::abs(v - rep.cd0_estimate));
  }
  rep.points = values.size();
  return rep;
}

std::vector<double> alpha_grid_deg(double first_deg, double last_deg,
                                   double step_deg) {
  std::vector<double> grid;
  const auto n = static_cast<int>(std::floor((last_deg - first_deg) / step_deg + 1e-9));
  for (int i = 0; i <= n; ++i) {
    grid.push_back(geom::deg2rad(first_deg + i * step_deg));
  }
  return grid;
}

std::vector<double> default_compatibility_grid() {
  return alpha_grid_deg(5.0, 175.0, 1.0);
}

Vec3 equivalent_drag(double ka, double cd0, const Vec3& v_air) {
  return -ka * cd0 * v_air.norm() * v_air;
}

SphericalEquivalent spherical_equivalence(const TrigCoeffModel& model,
                                          const AeroEnv& env,
                                          const Vec3& v_air_body,
                                          double thrust) {
  geom::require_finite(v_air_body, "air velocity");
  SphericalEquivalent out;
  const double speed = v_air_body.norm();
  if (speed < kMinAirspeed) {
    out.tp = thrust;
    return out;
  }
  // cos(alpha) = -va3 / |va|
  const double cos_alpha = -v_air_body.z() / speed;
  out.fp = equivalent_drag(env.ka, model.cd0(), v_air_body);
  out.tp = thrust + 2.0 * model.c1 * env.ka * speed * speed * cos_alpha;
  return out;
}

}  // namespace thrustdir::aero
