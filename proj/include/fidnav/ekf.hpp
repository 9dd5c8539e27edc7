#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "fidnav/attitude.hpp"
#include "fidnav/sensors.hpp"
#include "fidnav/truth.hpp"

namespace fidnav {

inline constexpr int kErrorStates = 18;
inline constexpr int kNoiseInputs = 12;

/// Error-state layout: [dp, dv, dtheta_bn, db_a, db_g, dtheta_cb], 3 each.
namespace err {
inline constexpr int kPos = 0;
inline constexpr int kVel = 3;
inline constexpr int kAtt = 6;
inline constexpr int kAccBias = 9;
inline constexpr int kGyroBias = 12;
inline constexpr int kCamMount = 15;
}  // namespace err

using Covariance = Eigen::Matrix<double, kErrorStates, kErrorStates>;
using ErrorState = Eigen::Matrix<double, kErrorStates, 1>;
using DynamicsMatrix = Eigen::Matrix<double, kErrorStates, kErrorStates>;
using NoiseCoupling = Eigen::Matrix<double, kErrorStates, kNoiseInputs>;
using NoiseMatrix = Eigen::Matrix<double, kNoiseInputs, kNoiseInputs>;

// Measurement-sized quantities are at most 3 rows; keep them on the stack.
using MeasVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using MeasMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using MeasJacobian = Eigen::Matrix<double, Eigen::Dynamic, kErrorStates, Eigen::RowMajor, 3,
                                   kErrorStates>;
using GainMatrix = Eigen::Matrix<double, kErrorStates, Eigen::Dynamic, 0, kErrorStates, 3>;

struct NavState {
  Vec3 p_hat = Vec3::Zero();
  Vec3 v_hat = Vec3::Zero();
  Quaternion q_bn_hat;
  Vec3 b_a_hat = Vec3::Zero();
  Vec3 b_g_hat = Vec3::Zero();
  Quaternion q_cb_hat;
};

NavState to_nav_state(const TruthState& x);
TruthState to_truth_state(const NavState& x);

/// Applies an error-state correction: additive for vectors, left-multiplied
/// correction_quat() for both attitudes, then renormalized.
NavState apply_correction(const NavState& x_hat, const ErrorState& dx);

/// Error of an estimate relative to truth in the same convention, so that
/// apply_correction(x_hat, state_error(x, x_hat)) reproduces x.
ErrorState state_error(const TruthState& x, const NavState& x_hat);

/// Estimate whose error relative to `x` is `dx`.
NavState remove_error(const TruthState& x, const ErrorState& dx);

// ============================================================================
// Propagation
// ============================================================================

struct NavDerivative {
  Vec3 p_dot;
  Vec3 v_dot;
  Quaternion q_dot;
  Vec3 b_a_dot;
  Vec3 b_g_dot;
  Quaternion q_cb_dot;
};

/// Estimate dynamics: bias estimates removed from the IMU sample, bias
/// estimates decay without noise, camera mount constant.
NavDerivative nav_derivative(const NavState& x_hat, const ImuSample& imu, const ImuSpec& spec);

/// Nonzero 3x3 blocks of F.
struct DynamicsBlocks {
  Mat3 t_bn;    // estimated body -> NED
  Mat3 f_att;   // ((T_bn (nu - b_a)) x)
  double inv_tau_a = 0.0;
  double inv_tau_g = 0.0;

  DynamicsMatrix dense() const;
  /// F * P without forming F.
  Covariance apply(const Covariance& p) const;
};

DynamicsBlocks dynamics_blocks(const NavState& x_hat, const ImuSample& imu, const ImuSpec& spec);

struct Linearization {
  DynamicsMatrix F;
  NoiseCoupling B;
};

Linearization linearize_dynamics(const NavState& x_hat, const ImuSample& imu,
                                 const ImuSpec& spec);

/// Block-diagonal white-noise PSD for [n_nu, n_omega, n_a, n_g].
struct ProcessNoise {
  Eigen::Matrix<double, kNoiseInputs, 1> diagonal = Eigen::Matrix<double, kNoiseInputs, 1>::Zero();

  NoiseMatrix matrix() const { return diagonal.asDiagonal(); }
};

ProcessNoise process_noise(const ImuSpec& spec);

/// B Q B^T; block-diagonal for diagonal Q.
Covariance driven_noise(const Mat3& t_bn, const ProcessNoise& q);

struct PropagateResult {
  NavState x_hat;
  Covariance P;
  bool healthy = true;
};

/// One RK4 step of the estimate and the Riccati equation
/// Pdot = F P + P F^T + B Q B^T, evaluated jointly with the IMU sample held
/// over the step. The result is symmetrized. `healthy` is a cheap diagonal
/// and finiteness check; see covariance_health() for the eigenvalue test.
PropagateResult propagate(const NavState& x_hat, const Covariance& P, const ImuSample& imu,
                          double dt, const ImuSpec& spec, const ProcessNoise& q);

struct CovarianceHealth {
  bool symmetric = true;
  bool psd = true;
  double min_eigenvalue = 0.0;

  bool ok() const { return symmetric && psd; }
};

/// Symmetry within 1e-10 relative and eigenvalues >= -1e-9 trace.
CovarianceHealth covariance_health(const Covariance& P);

// ============================================================================
// Measurements
// ============================================================================

enum class MeasKind { Gnss, Los };

std::string_view to_string(MeasKind kind);

struct MeasModel {
  MeasKind kind = MeasKind::Gnss;
  int fiducial_id = -1;
  MeasVector z_pred;
  MeasJacobian H;
  MeasMatrix G;
  MeasMatrix R;
};

/// Position fix model: z_pred = p_hat, H = [I 0], G = I, R = diag(sigma^2).
MeasModel predict_gnss(const NavState& x_hat, const GnssModel& gnss);

/// Camera-frame predicted line of sight using the estimated attitude and mount.
Vec3 predicted_los(const NavState& x_hat, const Vec3& fiducial_n, const Vec3& d_b);

/// Pinhole model with H = H_l * H_c. nullopt when the predicted depth is not
/// positive.
std::optional<MeasModel> predict_los(const NavState& x_hat, const Fiducial& fiducial,
                                     const CameraModel& camera);

/// Optimal gain P H^T (H P H^T + G R G^T)^-1.
GainMatrix kalman_gain(const Covariance& P, const MeasJacobian& H, const MeasMatrix& GRGt);

/// (I - K H) P (I - K H)^T + K G R G^T K^T
Covariance joseph_update(const Covariance& P, const GainMatrix& K, const MeasJacobian& H,
                         const MeasMatrix& GRGt);

struct UpdateResult {
  NavState x_hat;
  Covariance P;
  MeasVector residual;
  MeasMatrix residual_cov;  // H P H^T + G R G^T
  bool applied = false;
  std::string reason;       // set when the measurement is skipped
};

/// Kalman update with Joseph covariance form. Measurements whose residual
/// covariance has condition number >= 1e12 are skipped and flagged.
UpdateResult update(const NavState& x_hat, const Covariance& P, const MeasVector& z,
                    const MeasModel& model);

}  // namespace fidnav
