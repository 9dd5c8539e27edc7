#pragma once

#include <cstdint>
#include <vector>

#include "fidnav/ekf.hpp"

namespace fidnav {

/// Error-state time derivative implied by the nonlinear truth and navigation
/// models when the truth is apply_correction(x_hat, dx). Noise free.
ErrorState error_dynamics(const NavState& x_hat, const ErrorState& dx, const ImuSample& imu,
                          const ImuSpec& spec);

/// Central-difference Jacobian of error_dynamics at dx = 0.
DynamicsMatrix numerical_dynamics_jacobian(const NavState& x_hat, const ImuSample& imu,
                                           const ImuSpec& spec, double eps = 1e-5);

/// Central-difference Jacobian of the LOS projection with respect to the
/// error state. Returns a 2 x 18 matrix.
MeasJacobian numerical_los_jacobian(const NavState& x_hat, const Fiducial& fiducial,
                                    const CameraModel& camera, double eps = 1e-5);

struct JacobianSample {
  int index = 0;
  double f_rel_error = 0.0;
  double h_rel_error = 0.0;
};

struct JacobianAudit {
  std::vector<JacobianSample> samples;
  double max_f_rel_error = 0.0;
  double max_h_rel_error = 0.0;
  double tolerance = 1e-5;

  bool pass() const { return max_f_rel_error <= tolerance && max_h_rel_error <= tolerance; }
};

/// max |analytic - numerical| / max |analytic| over all entries.
double relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numerical);

/// Compares F and H_LOS against finite differences at `count` random
/// estimates and IMU samples. Each LOS sample places a fiducial in front of
/// the camera.
JacobianAudit audit_jacobians(int count, std::uint64_t seed, const ImuSpec& spec,
                              const CameraModel& camera, double tolerance = 1e-5);

}  // namespace fidnav
