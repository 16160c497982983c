// Aerodynamic characteristics of axisymmetric bodies.
//
// Forces follow the lift/drag decomposition
//   F_L = ka |va| C_L(alpha) r(beta) x va,   r(beta) = (-sin beta, cos beta, 0)
//   F_D = -ka |va| C_D(alpha) va
// with alpha the angle between -k and the air velocity va.
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "thrustdir/geom.hpp"

namespace thrustdir::aero {

using geom::Vec3;

/// C_D = c0 + 2 c1 sin^2(alpha), C_L = c1 sin(2 alpha).
/// Satisfies C_D + C_L cot(alpha) = c0 + 2 c1 for every alpha.
struct TrigCoeffModel {
  double c0 = 0.0;
  double c1 = 0.0;

  double cd(double alpha) const;
  double cl(double alpha) const;
  /// Equivalent (orientation independent) drag coefficient c0 + 2 c1.
  double cd0() const { return c0 + 2.0 * c1; }
};

enum class Symmetry { none, bisymmetric };

/// Linearly interpolated measurement table.
///
/// Angles are tabulated in degrees on [0, 90] or [0, 180] and clamped at the
/// ends. A bisymmetric table is pi-periodic in alpha; when it only covers
/// [0, 90] it is extended with C_D(pi - a) = C_D(a) and C_L(pi - a) = -C_L(a).
class TableCoeffModel {
 public:
  /// Throws ConfigError when the lists are unsorted, of unequal length,
  /// shorter than 2, out of range, or when a drag entry is negative.
  TableCoeffModel(std::vector<double> alpha_deg, std::vector<double> cl,
                  std::vector<double> cd, Symmetry symmetry);

  double cd(double alpha) const;
  double cl(double alpha) const;

  const std::vector<double>& alpha_deg() const { return alpha_deg_; }
  const std::vector<double>& cl_values() const { return cl_; }
  const std::vector<double>& cd_values() const { return cd_; }
  Symmetry symmetry() const { return symmetry_; }

 private:
  // Maps alpha (rad) to a tabulated angle (deg) and the lift sign.
  std::pair<double, double> fold(double alpha) const;
  static double interp(const std::vector<double>& xs,
                       const std::vector<double>& ys, double x);

  std::vector<double> alpha_deg_;
  std::vector<double> cl_;
  std::vector<double> cd_;
  Symmetry symmetry_;
};

using CoeffModel = std::variant<TrigCoeffModel, TableCoeffModel>;

double drag_coefficient(const CoeffModel& model, double alpha);
double lift_coefficient(const CoeffModel& model, double alpha);

struct AeroEnv {
  double ka = 0.3;            ///< rho * Sigma / 2 [kg/m]
  Vec3 v_wind = Vec3::Zero();  ///< inertial wind velocity [m/s]
};

struct AeroAngles {
  double alpha = 0.0;  ///< [0, pi]
  double beta = 0.0;   ///< (-pi, pi]
  bool valid_beta = false;
};

inline constexpr double kMinAirspeed = 1e-9;  // m/s
inline constexpr double kAxisSinAlpha = 1e-6;

/// alpha = acos(-va3/|va|), beta = atan2(va2, va1) from body-frame air
/// velocity. Throws ZeroAirspeed when |va| < 1e-9 m/s.
AeroAngles aero_angles(const Vec3& v_air_body);

/// Body-frame air velocity rebuilt from (alpha, beta, |va|).
Vec3 air_velocity_from_angles(double alpha, double beta, double speed);

/// Aerodynamic force F_L + F_D in body coordinates [N].
///
/// Away from the symmetry axis the closed form
///   F = -ka |va| [ (C_D + C_L cot a) va + (C_L / sin a) |va| k ]
/// is used. Below sin(alpha) = 1e-6 the analytic limit is taken instead:
/// C_L cot a -> 2 c1 cos^2 a and C_L / sin a -> 2 c1 cos a for the trig
/// family, pure drag for tables. Throws ZeroAirspeed.
Vec3 force_generic(const CoeffModel& model, const AeroEnv& env,
                   const Vec3& v_air_body);

/// Same force in inertial coordinates given the inertial air velocity and the
/// thrust axis k. Returns zero in still air instead of throwing.
Vec3 force_inertial(const CoeffModel& model, double ka, const Vec3& v_air,
                    const geom::Attitude& att);

struct CompatibilityReport {
  double cd0_estimate = 0.0;  ///< grid mean of C_D + C_L cot(alpha)
  double max_residual = 0.0;  ///< max |C_D + C_L cot(alpha) - cd0_estimate|
  std::size_t points = 0;
};

/// Residual of C_D + C_L cot(alpha) = const over `alpha_grid` (radians,
/// each strictly inside (0, pi); ContractViolation otherwise).
CompatibilityReport check_compatibility(const CoeffModel& model,
                                        std::span<const double> alpha_grid);

/// Degree grid from `first_deg` to `last_deg` inclusive, in radians.
std::vector<double> alpha_grid_deg(double first_deg, double last_deg,
                                   double step_deg);

/// Default grid for tables: 5..175 deg, which keeps away from the poles
/// where cot(alpha) is numerically unusable.
std::vector<double> default_compatibility_grid();

struct SphericalEquivalent {
  Vec3 fp = Vec3::Zero();  ///< equivalent drag, same frame as the input
  double tp = 0.0;         ///< equivalent thrust intensity [N]
};

/// F_p = -ka C_D0 |va| va, frame agnostic.
Vec3 equivalent_drag(double ka, double cd0, const Vec3& v_air);

/// Rewrites (F_a, T) as a sphere with drag F_p and thrust T_p so that
/// F_a - T k = F_p - T_p k:
///   F_p = -ka (c0 + 2 c1) |va| va,   T_p = T + 2 c1 ka |va|^2 cos(alpha).
/// Zero air speed yields F_p = 0, T_p = T.
SphericalEquivalent spherical_equivalence(const TrigCoeffModel& model,
                                          const AeroEnv& env,
                                          const Vec3& v_air_body,
                                          double thrust);

// ---------------------------------------------------------------------------
// Coefficient identification

struct CoeffSample {
  double alpha = 0.0;  ///< rad
  double cl = 0.0;
  double cd = 0.0;
};

enum class FitWeighting {
  uniform,   ///< every residual weighted by its channel weight
  relative,  ///< iteratively reweighted by 1/model^2 (multiplicative noise)
};

struct FitOptions {
  double drag_weight = 1.0;
  double lift_weight = 1.0;
  FitWeighting weighting = FitWeighting::uniform;
  int max_iterations = 20;
};

struct FitReport {
  TrigCoeffModel model;
  double rms_cd = 0.0;
  double rms_cl = 0.0;
  /// Compatibility residual of the raw samples with alpha in [5, 175] deg.
  double raw_compat_residual = 0.0;
  double raw_cd0_estimate = 0.0;
  std::size_t raw_compat_points = 0;
  int iterations = 0;
};

/// Joint linear least squares for (c0, c1) over the residuals
/// cd - c0 - 2 c1 sin^2(a) and cl - c1 sin(2a).
/// Throws DegenerateFit when c0 or c1 is unobservable.
FitReport fit_trig_model(std::span<const CoeffSample> samples,
                         const FitOptions& options = {});

std::string format_fit_report(const FitReport& report);

// ---------------------------------------------------------------------------
// Coefficient table CSV: header `alpha_deg,cl,cd`, '#' comments.

struct CoeffRow {
  double alpha_deg = 0.0;
  double cl = 0.0;
  double cd = 0.0;
};

/// Parses a coefficient table. Throws ConfigError with the line number on
/// malformed input or when alpha is not strictly ascending.
std::vector<CoeffRow> read_coeff_csv(std::istream& in);
std::vector<CoeffRow> read_coeff_csv_file(const std::string& path);
void write_coeff_csv(std::ostream& out, std::span<const CoeffRow> rows);

TableCoeffModel table_from_rows(std::span<const CoeffRow> rows,
                                Symmetry symmetry);
std::vector<CoeffSample> samples_from_rows(std::span<const CoeffRow> rows);

}  // namespace thrustdir::aero
