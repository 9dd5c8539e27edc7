#include "fidnav/jacobian_audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fidnav/random.hpp"
#include "fidnav/units.hpp"

namespace fidnav {

namespace {

Quaternion quat_add(const Quaternion& a, const Quaternion& b) {
  return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
}

// d/dt of the small-angle error -2 e_v / e_w with e = q q_hat^*.
Vec3 attitude_error_rate(const Quaternion& q, const Quaternion& q_dot, const Quaternion& q_hat,
                         const Quaternion& q_hat_dot) {
  Quaternion e = quat_mult(q, q_hat.conjugate());
  Quaternion e_dot = quat_add(quat_mult(q_dot, q_hat.conjugate()),
                              quat_mult(q, q_hat_dot.conjugate()));
  if (e.w < 0.0) {
    e = -e;
    e_dot = -e_dot;
  }
  return -2.0 * (e_dot.vec() * e.w - e.vec() * e_dot.w) / (e.w * e.w);
}

Quaternion random_quaternion(Rng& rng) {
  const Quaternion q(rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian());
  return q.normalized();
}

}  // namespace

ErrorState error_dynamics(const NavState& x_hat, const ErrorState& dx, const ImuSample& imu,
                          const ImuSpec& spec) {
  const TruthState x = to_truth_state(apply_correction(x_hat, dx));
  const TruthDerivative xd =
      truth_derivative(x, imu.nu_tilde - x.b_a, imu.omega_tilde - x.b_g, spec);
  const NavDerivative nd = nav_derivative(x_hat, imu, spec);

  ErrorState out;
  out.segment<3>(err::kPos) = xd.p_dot - nd.p_dot;
  out.segment<3>(err::kVel) = xd.v_dot - nd.v_dot;
  out.segment<3>(err::kAtt) = attitude_error_rate(x.q_bn, xd.q_dot, x_hat.q_bn_hat, nd.q_dot);
  out.segment<3>(err::kAccBias) = xd.b_a_dot - nd.b_a_dot;
  out.segment<3>(err::kGyroBias) = xd.b_g_dot - nd.b_g_dot;
  out.segment<3>(err::kCamMount) =
      attitude_error_rate(x.q_cb, xd.q_cb_dot, x_hat.q_cb_hat, nd.q_cb_dot);
  return out;
}

DynamicsMatrix numerical_dynamics_jacobian(const NavState& x_hat, const ImuSample& imu,
                                           const ImuSpec& spec, double eps) {
  DynamicsMatrix f;
  for (int j = 0; j < kErrorStates; ++j) {
    ErrorState d = ErrorState::Zero();
    d(j) = eps;
    f.col(j) = (error_dynamics(x_hat, d, imu, spec) - error_dynamics(x_hat, -d, imu, spec)) /
               (2.0 * eps);
  }
  return f;
}

MeasJacobian numerical_los_jacobian(const NavState& x_hat, const Fiducial& fiducial,
                                    const CameraModel& camera, double eps) {
  MeasJacobian h(2, kErrorStates);
  auto z = [&](const ErrorState& d) {
    return project(predicted_los(apply_correction(x_hat, d), fiducial.position_n, camera.d_b));
  };
  for (int j = 0; j < kErrorStates; ++j) {
    ErrorState d = ErrorState::Zero();
    d(j) = eps;
    h.col(j) = (z(d) - z(-d)) / (2.0 * eps);
  }
  return h;
}

double relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numerical) {
  const double scale = analytic.cwiseAbs().maxCoeff();
  const double diff = (analytic - numerical).cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

JacobianAudit audit_jacobians(int count, std::uint64_t seed, const ImuSpec& spec,
                              const CameraModel& camera, double tolerance) {
  JacobianAudit audit;
  audit.tolerance = tolerance;
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    NavState x_hat;
    x_hat.p_hat = Vec3(100.0 * rng.gaussian(), 100.0 * rng.gaussian(), -20.0 - 5.0 * rng.gaussian());
    x_hat.v_hat = 10.0 * rng.gaussian3();
    x_hat.q_bn_hat = random_quaternion(rng);
    x_hat.b_a_hat = 0.05 * rng.gaussian3();
    x_hat.b_g_hat = 1e-3 * rng.gaussian3();
    x_hat.q_cb_hat = random_quaternion(rng);

    ImuSample imu;
    imu.nu_tilde = Vec3(0.0, 0.0, -units::kGravity) + 2.0 * rng.gaussian3();
    imu.omega_tilde = 0.3 * rng.gaussian3();

    JacobianSample s;
    s.index = i;
    const Linearization lin = linearize_dynamics(x_hat, imu, spec);
    s.f_rel_error = relative_error(lin.F, numerical_dynamics_jacobian(x_hat, imu, spec));

    // Fiducial 10-40 m ahead along a random direction inside the camera cone.
    const Vec3 dir = Vec3(0.3 * rng.gaussian(), 0.3 * rng.gaussian(), 1.0).normalized();
    const double range = 10.0 + 30.0 * std::abs(std::tanh(rng.gaussian()));
    const Mat3 r_nb = quat_to_dcm(x_hat.q_bn_hat).transpose();
    const Mat3 r_bc = quat_to_dcm(x_hat.q_cb_hat).transpose();
    Fiducial fid;
    fid.id = i;
    fid.position_n =
        x_hat.p_hat + r_nb.transpose() * (camera.d_b + r_bc.transpose() * (range * dir));
    const auto model = predict_los(x_hat, fid, camera);
    if (model) {
      s.h_rel_error = relative_error(model->H, numerical_los_jacobian(x_hat, fid, camera));
    } else {
      s.h_rel_error = std::numeric_limits<double>::infinity();
    }
    audit.max_f_rel_error = std::max(audit.max_f_rel_error, s.f_rel_error);
    audit.max_h_rel_error = std::max(audit.max_h_rel_error, s.h_rel_error);
    audit.samples.push_back(s);
  }
  return audit;
}

}  // namespace fidnav
