#include "fidnav/sensors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fidnav {

std::string_view to_string(FovInterpretation fov) {
  return fov == FovInterpretation::HalfCone ? "half-cone" : "full-cone";
}

std::optional<FovInterpretation> parse_fov_interpretation(std::string_view name) {
  if (name == "half-cone") return FovInterpretation::HalfCone;
  if (name == "full-cone") return FovInterpretation::FullCone;
  return std::nullopt;
}

double CameraModel::gate_angle() const {
  return fov_interpretation == FovInterpretation::HalfCone ? fov_rad : 0.5 * fov_rad;
}

void CameraModel::validate() const {
  if (!(fov_rad > 0.0 && fov_rad < std::numbers::pi)) {
    throw std::invalid_argument("camera.fov_deg must be in (0, 180)");
  }
  if (fov_interpretation == FovInterpretation::HalfCone && !(fov_rad < 0.5 * std::numbers::pi)) {
    throw std::invalid_argument("camera.fov_deg must be below 90 for the half-cone gate");
  }
  if (!(sigma_los > 0.0) || !std::isfinite(sigma_los)) {
    throw std::invalid_argument("camera.sigma_3sigma_mrad must be positive");
  }
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
    throw std::invalid_argument("camera.rate_hz must be positive");
  }
  if (!d_b.allFinite()) throw std::invalid_argument("camera.lever_arm_m must be finite");
  if (std::abs(q_cb.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("camera.mount_quaternion must be unit norm");
  }
}

void GnssModel::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(sigma_xyz[i] > 0.0) || !std::isfinite(sigma_xyz[i])) {
      throw std::invalid_argument("gnss.sigma_3sigma_m entries must be positive");
    }
  }
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
    throw std::invalid_argument("gnss.rate_hz must be positive");
  }
  if (!(cutoff_altitude_m > 0.0) || !std::isfinite(cutoff_altitude_m)) {
    throw std::invalid_argument("gnss.cutoff_altitude_m must be positive");
  }
}

std::optional<GnssMeas> gnss_measure(const TruthState& x, const GnssModel& model, double t,
                                     Rng* rng) {
  if (!model.available(x.p_n)) return std::nullopt;
  GnssMeas m;
  m.t = t;
  m.z = x.p_n;
  if (rng != nullptr) m.z += model.sigma_xyz.cwiseProduct(rng->gaussian3());
  return m;
}

Vec3 los_vector(const TruthState& x, const Vec3& fiducial_n, const Vec3& d_b) {
  const Dcm t_nb = quat_to_dcm(x.q_bn).transpose();
  const Dcm t_bc = quat_to_dcm(x.q_cb).transpose();
  return t_bc * (t_nb * (fiducial_n - x.p_n) - d_b);
}

Vec2 project(const Vec3& los_c) {
  if (!(los_c.z() > 0.0)) throw std::domain_error("project: line of sight has l_z <= 0");
  return {los_c.x() / los_c.z(), los_c.y() / los_c.z()};
}

LosMeas los_measure(const TruthState& x, const Fiducial& fiducial, const CameraModel& camera,
                    double t, Rng* rng) {
  const Vec3 los = los_vector(x, fiducial.position_n, camera.d_b);
  if (!(los.z() > 0.0)) {
    throw std::domain_error("los_measure: fiducial " + std::to_string(fiducial.id) +
                            " is behind the camera");
  }
  LosMeas m;
  m.t = t;
  m.fiducial_id = fiducial.id;
  m.z = project(los);
  if (rng != nullptr) {
    const double nx = rng->gaussian();
    const double ny = rng->gaussian();
    m.z += camera.sigma_los * Vec2(nx, ny);
  }
  return m;
}

std::vector<int> visible_fiducials(const TruthState& x, const FiducialField& field,
                                   const CameraModel& camera) {
  const double cos_gate = std::cos(camera.gate_angle());
  std::vector<int> ids;
  for (const auto& f : field.fiducials) {
    const Vec3 los = los_vector(x, f.position_n, camera.d_b);
    const double range = los.norm();
    if (los.z() > 0.0 && range > 0.0 && los.z() >= cos_gate * range) ids.push_back(f.id);
  }
  return ids;
}

}  // namespace fidnav
