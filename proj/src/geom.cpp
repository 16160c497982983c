#include "thrustdir/geom.hpp"

#include <string>

#include "thrustdir/errors.hpp"

namespace thrustdir::geom {

bool is_finite(const Vec3& v) { return v.allFinite(); }

void require_finite(const Vec3& v, const char* what) {
  if (!v.allFinite()) {
    throw ContractViolation(std::string("non-finite vector: ") + what);
  }
}

double dot(const Vec3& a, const Vec3& b) {
  require_finite(a, "dot lhs");
  require_finite(b, "dot rhs");
  return a.dot(b);
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  require_finite(a, "cross lhs");
  require_finite(b, "cross rhs");
  return a.cross(b);
}

Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),  //
      a.z(), 0.0, -a.x(),   //
      -a.y(), a.x(), 0.0;
  return s;
}

double angle_between(const Vec3& a, const Vec3& b) {
  // atan2 form keeps full precision at both ends of [0, pi].
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

UnitVec3::UnitVec3(const Vec3& v) {
  require_finite(v, "unit vector");
  const double n = v.norm();
  if (n == 0.0) {
    throw ContractViolation("cannot normalize a zero vector");
  }
  inner_ = v / n;
}

Attitude::Attitude(const Mat3& r) {
  if (!r.allFinite()) {
    throw ContractViolation("non-finite attitude matrix");
  }
  if ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() > 5e-2 ||
      r.determinant() <= 0.0) {
    throw ContractViolation("matrix is not a proper rotation");
  }
  r_ = orthonormalize(r);
}

Attitude Attitude::from_euler(double roll, double pitch, double yaw) {
  const Mat3 r = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                  Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                  Eigen::AngleAxisd(roll, Vec3::UnitX()))
                     .toRotationMatrix();
  return Attitude(r);
}

Attitude Attitude::from_axis_angle(const Vec3& axis, double angle) {
  const UnitVec3 u(axis);
  return Attitude(exp_so3(u.vec() * angle));
}

double Attitude::orthonormality_error() const {
  return (r_.transpose() * r_ - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Vec3 rotate_body_to_inertial(const Attitude& att, const Vec3& v_body) {
  require_finite(v_body, "body vector");
  return att.matrix() * v_body;
}

Vec3 rotate_inertial_to_body(const Attitude& att, const Vec3& v_inertial) {
  require_finite(v_inertial, "inertial vector");
  return att.matrix().transpose() * v_inertial;
}

Mat3 exp_so3(const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 k = skew(phi);
  double a = 0.0;
  double b = 0.0;
  if (theta < 1e-6) {
    // Taylor series to machine precision for tiny angles.
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Mat3::Identity() + a * k + b * k * k;
}

Attitude integrate_attitude(const Attitude& att, const Vec3& omega_body,
                            double dt) {
  require_finite(omega_body, "angular velocity");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ContractViolation("integrate_attitude requires dt > 0");
  }
  if (omega_body.isZero(0.0)) {
    return att;
  }
  return Attitude(att.matrix() * exp_so3(omega_body * dt));
}

Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) {
    u.col(2) = -u.col(2);
  }
  return u * v.transpose();
}

}  // namespace thrustdir::geom
