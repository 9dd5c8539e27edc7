#pragma once

#include <Eigen/Dense>

namespace fidnav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rotation matrix. quat_to_dcm(q_b^n) yields T_b^n, mapping body-frame
/// vectors into the navigation frame.
using Dcm = Eigen::Matrix3d;

/// Scalar-first attitude quaternion.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Quaternion() = default;
  Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}
  Quaternion(double scalar, const Vec3& v) : w(scalar), x(v.x()), y(v.y()), z(v.z()) {}

  static Quaternion identity() { return {}; }
  /// Rotation by |axis_angle| radians about axis_angle/|axis_angle|.
  static Quaternion from_axis_angle(const Vec3& axis_angle);

  Vec3 vec() const { return {x, y, z}; }
  double norm() const;
  Quaternion normalized() const;
  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  Quaternion operator-() const { return {-w, -x, -y, -z}; }

  bool operator==(const Quaternion&) const = default;
};

/// Hamilton product: scalar = s1*s2 - v1.v2, vector = v1 x v2 + s1*v2 + s2*v1.
Quaternion quat_mult(const Quaternion& q1, const Quaternion& q2);

inline Quaternion operator*(const Quaternion& q1, const Quaternion& q2) {
  return quat_mult(q1, q2);
}

/// Active rotation matrix of a unit quaternion. Throws std::invalid_argument
/// if |q| differs from one by more than 1e-6.
Dcm quat_to_dcm(const Quaternion& q);

/// Cross-product matrix: skew(v) * u == v.cross(u).
Mat3 skew(const Vec3& v);

/// Normalized [1, -dtheta/2]. Left-multiplying an estimate by this applies an
/// estimated attitude error dtheta.
Quaternion correction_quat(const Vec3& dtheta);

/// Inverse of correction_quat: the error vector dtheta for which
/// q_true == correction_quat(dtheta) * q_est (up to sign of the quaternion).
Vec3 attitude_error(const Quaternion& q_true, const Quaternion& q_est);

/// Quaternion from yaw, pitch, roll (3-2-1 sequence), radians.
Quaternion quat_from_euler(double yaw, double pitch, double roll);

}  // namespace fidnav
