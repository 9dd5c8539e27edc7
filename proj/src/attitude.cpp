#include "fidnav/attitude.hpp"

#include <cmath>
#include <stdexcept>

namespace fidnav {

Quaternion Quaternion::from_axis_angle(const Vec3& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle < 1e-300) return identity();
  const Vec3 axis = axis_angle / angle;
  return {std::cos(0.5 * angle), std::sin(0.5 * angle) * axis};
}

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Quaternion quat_mult(const Quaternion& q1, const Quaternion& q2) {
  const Vec3 v1 = q1.vec();
  const Vec3 v2 = q2.vec();
  const double scalar = -v1.dot(v2) + q1.w * q2.w;
  const Vec3 vector = v1.cross(v2) + q1.w * v2 + q2.w * v1;
  return {scalar, vector};
}

Dcm quat_to_dcm(const Quaternion& q) {
  if (std::abs(q.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("quat_to_dcm: quaternion is not unit norm");
  }
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Dcm r;
  r << w * w + x * x - y * y - z * z, 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
      2.0 * (x * y + w * z), w * w - x * x + y * y - z * z, 2.0 * (y * z - w * x),
      2.0 * (x * z - w * y), 2.0 * (y * z + w * x), w * w - x * x - y * y + z * z;
  return r;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Quaternion correction_quat(const Vec3& dtheta) {
  return Quaternion(1.0, -0.5 * dtheta).normalized();
}

Vec3 attitude_error(const Quaternion& q_true, const Quaternion& q_est) {
  Quaternion e = quat_mult(q_true, q_est.conjugate());
  if (e.w < 0.0) e = -e;
  return -2.0 * e.vec() / e.w;
}

Quaternion quat_from_euler(double yaw, double pitch, double roll) {
  const Quaternion qz(std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw));
  const Quaternion qy(std::cos(0.5 * pitch), 0.0, std::sin(0.5 * pitch), 0.0);
  const Quaternion qx(std::cos(0.5 * roll), std::sin(0.5 * roll), 0.0, 0.0);
  return quat_mult(quat_mult(qz, qy), qx);
}

}  // namespace fidnav
