#include <cmath>
#include <stdexcept>
#include <string>

#include "fidnav/truth.hpp"
#include "fidnav/units.hpp"

namespace fidnav {

namespace {

Quaternion add_scaled(const Quaternion& q, const Quaternion& dq, double h) {
  return {q.w + h * dq.w, q.x + h * dq.x, q.y + h * dq.y, q.z + h * dq.z};
}

struct Kinematics {
  Vec3 p;
  Vec3 v;
  Quaternion q;
};

Kinematics kinematic_rate(const Kinematics& k, const Vec3& nu_b, const Vec3& omega_b) {
  const Quaternion half = quat_mult(k.q, Quaternion(0.0, omega_b));
  return {k.v, quat_to_dcm(k.q.normalized()) * nu_b + gravity_ned(),
          {0.5 * half.w, 0.5 * half.x, 0.5 * half.y, 0.5 * half.z}};
}

Kinematics advance(const Kinematics& k, const Kinematics& rate, double h) {
  return {k.p + h * rate.p, k.v + h * rate.v, add_scaled(k.q, rate.q, h)};
}

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(field) + " must be positive and finite");
  }
}

void require_nonnegative(double value, const char* field) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(field) + " must be nonnegative and finite");
  }
}

}  // namespace

Vec3 gravity_ned() { return {0.0, 0.0, units::kGravity}; }

std::string_view to_string(ImuGrade grade) {
  switch (grade) {
    case ImuGrade::Commercial: return "commercial";
    case ImuGrade::Tactical: return "tactical";
    case ImuGrade::Navigation: return "navigation";
    case ImuGrade::Custom: return "custom";
  }
  return "custom";
}

std::optional<ImuGrade> parse_imu_grade(std::string_view name) {
  if (name == "commercial") return ImuGrade::Commercial;
  if (name == "tactical") return ImuGrade::Tactical;
  if (name == "navigation") return ImuGrade::Navigation;
  if (name == "custom") return ImuGrade::Custom;
  return std::nullopt;
}

ImuSpec ImuSpec::preset(ImuGrade grade, double tau_a, double tau_g) {
  ImuSpec s;
  s.tau_a = tau_a;
  s.tau_g = tau_g;
  switch (grade) {
    case ImuGrade::Commercial:
      s.sigma_ss_a = 0.0100;
      s.q_nu = 0.600;
      s.sigma_ss_g = 10.0;
      s.q_omega = 0.700;
      break;
    case ImuGrade::Tactical:
    case ImuGrade::Custom:
      s.sigma_ss_a = 0.0010;
      s.q_nu = 0.060;
      s.sigma_ss_g = 1.0;
      s.q_omega = 0.070;
      break;
    case ImuGrade::Navigation:
      s.sigma_ss_a = 0.0001;
      s.q_nu = 0.006;
      s.sigma_ss_g = 0.1;
      s.q_omega = 0.007;
      break;
  }
  return s;
}

double ImuSpec::sigma_ss_a_si() const { return units::g_to_mps2(sigma_ss_a); }
double ImuSpec::sigma_ss_g_si() const { return units::deg_per_hr_to_rad_per_s(sigma_ss_g); }
double ImuSpec::q_nu_si() const { return units::vrw_to_psd(q_nu); }
double ImuSpec::q_omega_si() const { return units::arw_to_psd(q_omega); }

void ImuSpec::validate() const {
  require_nonnegative(sigma_ss_a, "imu.accel_bias_sigma_g");
  require_nonnegative(q_nu, "imu.vrw_mps_per_sqrt_hr");
  require_nonnegative(sigma_ss_g, "imu.gyro_bias_sigma_deg_per_hr");
  require_nonnegative(q_omega, "imu.arw_deg_per_sqrt_hr");
  require_positive(tau_a, "imu.tau_accel_s");
  require_positive(tau_g, "imu.tau_gyro_s");
}

TruthDerivative truth_derivative(const TruthState& x, const Vec3& nu_b, const Vec3& omega_b,
                                 const ImuSpec& spec, const BiasNoise& noise) {
  const Quaternion half = quat_mult(x.q_bn, Quaternion(0.0, omega_b));
  TruthDerivative d;
  d.p_dot = x.v_n;
  d.v_dot = quat_to_dcm(x.q_bn) * nu_b + gravity_ned();
  d.q_dot = {0.5 * half.w, 0.5 * half.x, 0.5 * half.y, 0.5 * half.z};
  d.b_a_dot = -x.b_a / spec.tau_a + noise.n_a;
  d.b_g_dot = -x.b_g / spec.tau_g + noise.n_g;
  d.q_cb_dot = {0.0, 0.0, 0.0, 0.0};
  return d;
}

TruthState step_truth(const TruthState& x, const Vec3& nu_b, const Vec3& omega_b,
                      const ImuSpec& spec, double dt, Rng* rng) {
  if (!(dt > 0.0) || dt > 0.02 + 1e-12) {
    throw std::invalid_argument("step_truth: dt must be in (0, 0.02] s");
  }
  const Kinematics k0{x.p_n, x.v_n, x.q_bn};
  const Kinematics r1 = kinematic_rate(k0, nu_b, omega_b);
  const Kinematics r2 = kinematic_rate(advance(k0, r1, 0.5 * dt), nu_b, omega_b);
  const Kinematics r3 = kinematic_rate(advance(k0, r2, 0.5 * dt), nu_b, omega_b);
  const Kinematics r4 = kinematic_rate(advance(k0, r3, dt), nu_b, omega_b);

  TruthState out = x;
  out.p_n = x.p_n + dt / 6.0 * (r1.p + 2.0 * r2.p + 2.0 * r3.p + r4.p);
  out.v_n = x.v_n + dt / 6.0 * (r1.v + 2.0 * r2.v + 2.0 * r3.v + r4.v);
  Quaternion q = x.q_bn;
  q = add_scaled(q, r1.q, dt / 6.0);
  q = add_scaled(q, r2.q, dt / 3.0);
  q = add_scaled(q, r3.q, dt / 3.0);
  q = add_scaled(q, r4.q, dt / 6.0);
  out.q_bn = q.normalized();

  const double phi_a = std::exp(-dt / spec.tau_a);
  const double phi_g = std::exp(-dt / spec.tau_g);
  out.b_a = phi_a * x.b_a;
  out.b_g = phi_g * x.b_g;
  if (rng != nullptr) {
    out.b_a += spec.sigma_ss_a_si() * std::sqrt(1.0 - phi_a * phi_a) * rng->gaussian3();
    out.b_g += spec.sigma_ss_g_si() * std::sqrt(1.0 - phi_g * phi_g) * rng->gaussian3();
  }
  return out;
}

ImuSample imu_sample(const TruthState& x, const Vec3& nu_b, const Vec3& omega_b,
                     const ImuSpec& spec, double dt, double t, Rng* rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("imu_sample: dt must be positive");
  ImuSample s;
  s.t = t;
  s.nu_tilde = nu_b + x.b_a;
  s.omega_tilde = omega_b + x.b_g;
  if (rng != nullptr) {
    s.nu_tilde += std::sqrt(spec.q_nu_si() / dt) * rng->gaussian3();
    s.omega_tilde += std::sqrt(spec.q_omega_si() / dt) * rng->gaussian3();
  }
  return s;
}

const Fiducial* FiducialField::find(int id) const {
  for (const auto& f : fiducials) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

FiducialField place_fiducials(const TrajectoryPlan& plan, double spacing_m, double offset_m) {
  if (!(spacing_m > 0.0)) throw std::invalid_argument("fiducials.spacing_m must be positive");
  FiducialField field;
  field.along_track_spacing_m = spacing_m;
  field.cross_track_offset_m = offset_m;
  const double end = plan.ground_speed_mps * plan.duration_s;
  const double length = end - plan.corridor_start_m;
  if (length < 0.0) return field;
  const auto count = static_cast<int>(std::floor(length / spacing_m + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) {
    const double side = (i % 2 == 0) ? 1.0 : -1.0;
    field.fiducials.push_back(
        {i, Vec3(plan.corridor_start_m + i * spacing_m, side * offset_m, 0.0)});
  }
  return field;
}

}  // namespace fidnav
