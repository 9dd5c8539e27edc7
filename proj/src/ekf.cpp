#include "fidnav/ekf.hpp"

#include <cmath>

namespace fidnav {

namespace {

using Block3 = Eigen::Matrix<double, 3, kErrorStates>;

Quaternion add_scaled(const Quaternion& q, const Quaternion& dq, double h) {
  return {q.w + h * dq.w, q.x + h * dq.x, q.y + h * dq.y, q.z + h * dq.z};
}

NavState advance(const NavState& x, const NavDerivative& d, double h) {
  NavState out = x;
  out.p_hat += h * d.p_dot;
  out.v_hat += h * d.v_dot;
  out.q_bn_hat = add_scaled(x.q_bn_hat, d.q_dot, h);
  out.b_a_hat += h * d.b_a_dot;
  out.b_g_hat += h * d.b_g_dot;
  return out;
}

}  // namespace

NavState to_nav_state(const TruthState& x) {
  return {x.p_n, x.v_n, x.q_bn, x.b_a, x.b_g, x.q_cb};
}

TruthState to_truth_state(const NavState& x) {
  return {x.p_hat, x.v_hat, x.q_bn_hat, x.b_a_hat, x.b_g_hat, x.q_cb_hat};
}

NavState apply_correction(const NavState& x_hat, const ErrorState& dx) {
  NavState out;
  out.p_hat = x_hat.p_hat + dx.segment<3>(err::kPos);
  out.v_hat = x_hat.v_hat + dx.segment<3>(err::kVel);
  out.q_bn_hat =
      quat_mult(correction_quat(dx.segment<3>(err::kAtt)), x_hat.q_bn_hat).normalized();
  out.b_a_hat = x_hat.b_a_hat + dx.segment<3>(err::kAccBias);
  out.b_g_hat = x_hat.b_g_hat + dx.segment<3>(err::kGyroBias);
  out.q_cb_hat =
      quat_mult(correction_quat(dx.segment<3>(err::kCamMount)), x_hat.q_cb_hat).normalized();
  return out;
}

ErrorState state_error(const TruthState& x, const NavState& x_hat) {
  ErrorState dx;
  dx.segment<3>(err::kPos) = x.p_n - x_hat.p_hat;
  dx.segment<3>(err::kVel) = x.v_n - x_hat.v_hat;
  dx.segment<3>(err::kAtt) = attitude_error(x.q_bn, x_hat.q_bn_hat);
  dx.segment<3>(err::kAccBias) = x.b_a - x_hat.b_a_hat;
  dx.segment<3>(err::kGyroBias) = x.b_g - x_hat.b_g_hat;
  dx.segment<3>(err::kCamMount) = attitude_error(x.q_cb, x_hat.q_cb_hat);
  return dx;
}

NavState remove_error(const TruthState& x, const ErrorState& dx) {
  NavState out;
  out.p_hat = x.p_n - dx.segment<3>(err::kPos);
  out.v_hat = x.v_n - dx.segment<3>(err::kVel);
  out.q_bn_hat =
      quat_mult(correction_quat(dx.segment<3>(err::kAtt)).conjugate(), x.q_bn).normalized();
  out.b_a_hat = x.b_a - dx.segment<3>(err::kAccBias);
  out.b_g_hat = x.b_g - dx.segment<3>(err::kGyroBias);
  out.q_cb_hat =
      quat_mult(correction_quat(dx.segment<3>(err::kCamMount)).conjugate(), x.q_cb).normalized();
  return out;
}

NavDerivative nav_derivative(const NavState& x_hat, const ImuSample& imu, const ImuSpec& spec) {
  const Vec3 nu = imu.nu_tilde - x_hat.b_a_hat;
  const Vec3 omega = imu.omega_tilde - x_hat.b_g_hat;
  const Quaternion half = quat_mult(x_hat.q_bn_hat, Quaternion(0.0, omega));
  NavDerivative d;
  d.p_dot = x_hat.v_hat;
  d.v_dot = quat_to_dcm(x_hat.q_bn_hat.normalized()) * nu + gravity_ned();
  d.q_dot = {0.5 * half.w, 0.5 * half.x, 0.5 * half.y, 0.5 * half.z};
  d.b_a_dot = -x_hat.b_a_hat / spec.tau_a;
  d.b_g_dot = -x_hat.b_g_hat / spec.tau_g;
  d.q_cb_dot = {0.0, 0.0, 0.0, 0.0};
  return d;
}

DynamicsBlocks dynamics_blocks(const NavState& x_hat, const ImuSample& imu, const ImuSpec& spec) {
  DynamicsBlocks b;
  b.t_bn = quat_to_dcm(x_hat.q_bn_hat.normalized());
  b.f_att = skew(b.t_bn * (imu.nu_tilde - x_hat.b_a_hat));
  b.inv_tau_a = 1.0 / spec.tau_a;
  b.inv_tau_g = 1.0 / spec.tau_g;
  return b;
}

DynamicsMatrix DynamicsBlocks::dense() const {
  DynamicsMatrix f = DynamicsMatrix::Zero();
  f.block<3, 3>(err::kPos, err::kVel) = Mat3::Identity();
  f.block<3, 3>(err::kVel, err::kAtt) = f_att;
  f.block<3, 3>(err::kVel, err::kAccBias) = -t_bn;
  f.block<3, 3>(err::kAtt, err::kGyroBias) = t_bn;
  f.block<3, 3>(err::kAccBias, err::kAccBias) = -inv_tau_a * Mat3::Identity();
  f.block<3, 3>(err::kGyroBias, err::kGyroBias) = -inv_tau_g * Mat3::Identity();
  return f;
}

Covariance DynamicsBlocks::apply(const Covariance& p) const {
  Covariance fp;
  const Block3 p_att = p.middleRows<3>(err::kAtt);
  const Block3 p_ba = p.middleRows<3>(err::kAccBias);
  const Block3 p_bg = p.middleRows<3>(err::kGyroBias);
  fp.middleRows<3>(err::kPos) = p.middleRows<3>(err::kVel);
  fp.middleRows<3>(err::kVel).noalias() = f_att * p_att;
  fp.middleRows<3>(err::kVel).noalias() -= t_bn * p_ba;
  fp.middleRows<3>(err::kAtt).noalias() = t_bn * p_bg;
  fp.middleRows<3>(err::kAccBias) = -inv_tau_a * p_ba;
  fp.middleRows<3>(err::kGyroBias) = -inv_tau_g * p_bg;
  fp.middleRows<3>(err::kCamMount).setZero();
  return fp;
}

Linearization linearize_dynamics(const NavState& x_hat, const ImuSample& imu,
                                 const ImuSpec& spec) {
  const DynamicsBlocks blocks = dynamics_blocks(x_hat, imu, spec);
  Linearization lin;
  lin.F = blocks.dense();
  lin.B.setZero();
  lin.B.block<3, 3>(err::kVel, 0) = -blocks.t_bn;
  lin.B.block<3, 3>(err::kAtt, 3) = blocks.t_bn;
  lin.B.block<3, 3>(err::kAccBias, 6) = Mat3::Identity();
  lin.B.block<3, 3>(err::kGyroBias, 9) = Mat3::Identity();
  return lin;
}

ProcessNoise process_noise(const ImuSpec& spec) {
  ProcessNoise q;
  const double sa = spec.sigma_ss_a_si();
  const double sg = spec.sigma_ss_g_si();
  q.diagonal.segment<3>(0).setConstant(spec.q_nu_si());
  q.diagonal.segment<3>(3).setConstant(spec.q_omega_si());
  q.diagonal.segment<3>(6).setConstant(2.0 * sa * sa / spec.tau_a);
  q.diagonal.segment<3>(9).setConstant(2.0 * sg * sg / spec.tau_g);
  return q;
}

Covariance driven_noise(const Mat3& t_bn, const ProcessNoise& q) {
  Covariance bqb = Covariance::Zero();
  const auto& d = q.diagonal;
  bqb.block<3, 3>(err::kVel, err::kVel) =
      t_bn * d.segment<3>(0).asDiagonal() * t_bn.transpose();
  bqb.block<3, 3>(err::kAtt, err::kAtt) =
      t_bn * d.segment<3>(3).asDiagonal() * t_bn.transpose();
  bqb.block<3, 3>(err::kAccBias, err::kAccBias) = d.segment<3>(6).asDiagonal();
  bqb.block<3, 3>(err::kGyroBias, err::kGyroBias) = d.segment<3>(9).asDiagonal();
  return bqb;
}

PropagateResult propagate(const NavState& x_hat, const Covariance& P, const ImuSample& imu,
                          double dt, const ImuSpec& spec, const ProcessNoise& q) {
  struct Rate {
    NavDerivative x;
    Covariance p;
  };
  auto rate = [&](const NavState& xs, const Covariance& ps) {
    Rate r;
    r.x = nav_derivative(xs, imu, spec);
    NavState unit = xs;
    unit.q_bn_hat = xs.q_bn_hat.normalized();
    const DynamicsBlocks blocks = dynamics_blocks(unit, imu, spec);
    const Covariance fp = blocks.apply(ps);
    r.p = fp + fp.transpose() + driven_noise(blocks.t_bn, q);
    return r;
  };

  const Rate k1 = rate(x_hat, P);
  const Rate k2 = rate(advance(x_hat, k1.x, 0.5 * dt), P + 0.5 * dt * k1.p);
  const Rate k3 = rate(advance(x_hat, k2.x, 0.5 * dt), P + 0.5 * dt * k2.p);
  const Rate k4 = rate(advance(x_hat, k3.x, dt), P + dt * k3.p);

  PropagateResult out;
  NavState& x = out.x_hat;
  x = x_hat;
  x.p_hat += dt / 6.0 * (k1.x.p_dot + 2.0 * k2.x.p_dot + 2.0 * k3.x.p_dot + k4.x.p_dot);
  x.v_hat += dt / 6.0 * (k1.x.v_dot + 2.0 * k2.x.v_dot + 2.0 * k3.x.v_dot + k4.x.v_dot);
  Quaternion qb = x_hat.q_bn_hat;
  qb = add_scaled(qb, k1.x.q_dot, dt / 6.0);
  qb = add_scaled(qb, k2.x.q_dot, dt / 3.0);
  qb = add_scaled(qb, k3.x.q_dot, dt / 3.0);
  qb = add_scaled(qb, k4.x.q_dot, dt / 6.0);
  x.q_bn_hat = qb.normalized();
  x.b_a_hat += dt / 6.0 * (k1.x.b_a_dot + 2.0 * k2.x.b_a_dot + 2.0 * k3.x.b_a_dot + k4.x.b_a_dot);
  x.b_g_hat += dt / 6.0 * (k1.x.b_g_dot + 2.0 * k2.x.b_g_dot + 2.0 * k3.x.b_g_dot + k4.x.b_g_dot);

  Covariance p_next = P + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
  out.P = 0.5 * (p_next + p_next.transpose());
  out.healthy = out.P.allFinite() && (out.P.diagonal().array() >= 0.0).all();
  return out;
}

CovarianceHealth covariance_health(const Covariance& P) {
  CovarianceHealth h;
  const double scale = P.cwiseAbs().maxCoeff();
  h.symmetric = (P - P.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale;
  if (!P.allFinite()) {
    h.psd = false;
    h.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    return h;
  }
  Eigen::SelfAdjointEigenSolver<Covariance> eig(P, Eigen::EigenvaluesOnly);
  h.min_eigenvalue = eig.eigenvalues().minCoeff();
  h.psd = h.min_eigenvalue >= -1e-9 * P.trace();
  return h;
}

std::string_view to_string(MeasKind kind) { return kind == MeasKind::Gnss ? "gnss" : "los"; }

MeasModel predict_gnss(const NavState& x_hat, const GnssModel& gnss) {
  MeasModel m;
  m.kind = MeasKind::Gnss;
  m.z_pred = x_hat.p_hat;
  m.H = MeasJacobian::Zero(3, kErrorStates);
  m.H.block<3, 3>(0, err::kPos).setIdentity();
  m.G = MeasMatrix::Identity(3, 3);
  m.R = gnss.sigma_xyz.cwiseAbs2().asDiagonal();
  return m;
}

Vec3 predicted_los(const NavState& x_hat, const Vec3& fiducial_n, const Vec3& d_b) {
  const Dcm r_nb = quat_to_dcm(x_hat.q_bn_hat).transpose();
  const Dcm r_bc = quat_to_dcm(x_hat.q_cb_hat).transpose();
  return r_bc * (r_nb * (fiducial_n - x_hat.p_hat) - d_b);
}

std::optional<MeasModel> predict_los(const NavState& x_hat, const Fiducial& fiducial,
                                     const CameraModel& camera) {
  const Dcm r_nb = quat_to_dcm(x_hat.q_bn_hat).transpose();
  const Dcm r_bc = quat_to_dcm(x_hat.q_cb_hat).transpose();
  const Vec3 rel_n = fiducial.position_n - x_hat.p_hat;
  const Vec3 rel_b = r_nb * rel_n - camera.d_b;
  const Vec3 l = r_bc * rel_b;
  if (!(l.z() > 0.0)) return std::nullopt;

  Eigen::Matrix<double, 2, 3> h_l;
  h_l << 1.0 / l.z(), 0.0, -l.x() / (l.z() * l.z()),
         0.0, 1.0 / l.z(), -l.y() / (l.z() * l.z());

  Block3 h_c = Block3::Zero();
  h_c.block<3, 3>(0, err::kPos) = -r_bc * r_nb;
  h_c.block<3, 3>(0, err::kAtt) = r_bc * r_nb * skew(-rel_n);
  h_c.block<3, 3>(0, err::kCamMount) = -r_bc * skew(rel_b);

  MeasModel m;
  m.kind = MeasKind::Los;
  m.fiducial_id = fiducial.id;
  m.z_pred = Vec2(l.x() / l.z(), l.y() / l.z());
  m.H = h_l * h_c;
  m.G = MeasMatrix::Identity(2, 2);
  m.R = MeasMatrix::Identity(2, 2) * (camera.sigma_los * camera.sigma_los);
  return m;
}

GainMatrix kalman_gain(const Covariance& P, const MeasJacobian& H, const MeasMatrix& GRGt) {
  const GainMatrix pht = P * H.transpose();
  const MeasMatrix s = H * pht + GRGt;
  return s.ldlt().solve(pht.transpose()).transpose();
}

Covariance joseph_update(const Covariance& P, const GainMatrix& K, const MeasJacobian& H,
                         const MeasMatrix& GRGt) {
  const DynamicsMatrix ikh = DynamicsMatrix::Identity() - K * H;
  Covariance out = ikh * P * ikh.transpose() + K * GRGt * K.transpose();
  return 0.5 * (out + out.transpose());
}

UpdateResult update(const NavState& x_hat, const Covariance& P, const MeasVector& z,
                    const MeasModel& model) {
  UpdateResult out;
  out.x_hat = x_hat;
  out.P = P;
  out.residual = z - model.z_pred;

  const MeasMatrix grgt = model.G * model.R * model.G.transpose();
  out.residual_cov = model.H * P * model.H.transpose() + grgt;

  // Guard against underflow in long measurement-rich segments.
  const auto n = out.residual_cov.rows();
  const MeasMatrix s_guarded =
      out.residual_cov + 1e-15 * out.residual_cov.trace() * MeasMatrix::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<MeasMatrix> eig(s_guarded, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!std::isfinite(lo) || !(lo > 0.0) || hi / lo >= 1e12) {
    out.reason = "residual covariance near singular";
    return out;
  }

  const GainMatrix pht = P * model.H.transpose();
  const GainMatrix K = s_guarded.ldlt().solve(pht.transpose()).transpose();
  const ErrorState dx = K * out.residual;
  out.P = joseph_update(P, K, model.H, grgt);
  out.x_hat = apply_correction(x_hat, dx);
  out.applied = true;
  return out;
}

}  // namespace fidnav
