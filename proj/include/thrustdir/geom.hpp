// 3-vector algebra and body attitude.
//
// Inertial frame is North-East-Down with gravity along +k0. The body frame
// {i, j, k} has k along the thrust axis; thrust force is -T k.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace thrustdir::geom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

bool is_finite(const Vec3& v);

/// Throws ContractViolation naming `what` if any component is NaN or Inf.
void require_finite(const Vec3& v, const char* what);

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);

/// Skew-symmetric matrix with skew(a) * b == a x b.
Mat3 skew(const Vec3& a);

/// Angle between two non-zero vectors, robust near 0 and pi.
double angle_between(const Vec3& a, const Vec3& b);

/// Unit-norm direction. Construction normalizes; |inner| = 1 to 1e-12.
class UnitVec3 {
 public:
  UnitVec3() = default;

  /// Normalizes `v`. Throws ContractViolation for non-finite or zero input.
  explicit UnitVec3(const Vec3& v);

  const Vec3& vec() const { return inner_; }
  double x() const { return inner_.x(); }
  double y() const { return inner_.y(); }
  double z() const { return inner_.z(); }

  operator const Vec3&() const { return inner_; }  // NOLINT

 private:
  Vec3 inner_ = Vec3::UnitZ();
};

/// Rotation carrying the body basis {i,j,k} onto the inertial basis.
/// Columns of matrix() are i, j, k expressed in inertial coordinates.
class Attitude {
 public:
  Attitude() = default;

  /// Projects `r` onto SO(3). Throws ContractViolation if `r` is not finite
  /// or is too far from a rotation to be repaired.
  explicit Attitude(const Mat3& r);

  static Attitude identity() { return Attitude{}; }

  /// R = Rz(yaw) Ry(pitch) Rx(roll), angles in radians.
  static Attitude from_euler(double roll, double pitch, double yaw);

  /// Rotation by `angle` about the unit inertial axis `axis`.
  static Attitude from_axis_angle(const Vec3& axis, double angle);

  const Mat3& matrix() const { return r_; }

  /// Thrust axis k in inertial coordinates.
  Vec3 k() const { return r_.col(2); }

  /// max |R^T R - I| entry.
  double orthonormality_error() const;

 private:
  Mat3 r_ = Mat3::Identity();
};

Vec3 rotate_body_to_inertial(const Attitude& att, const Vec3& v_body);
Vec3 rotate_inertial_to_body(const Attitude& att, const Vec3& v_inertial);

/// Rotation matrix exp(skew(phi)) via Rodrigues' formula.
Mat3 exp_so3(const Vec3& phi);

/// Advances the attitude by a constant body-frame angular velocity over
/// `dt` seconds: R <- R exp(skew(omega_body dt)), then renormalizes.
/// Throws ContractViolation for dt <= 0 or non-finite omega.
Attitude integrate_attitude(const Attitude& att, const Vec3& omega_body,
                            double dt);

/// Nearest rotation to `m` (polar decomposition through SVD).
Mat3 orthonormalize(const Mat3& m);

}  // namespace thrustdir::geom
