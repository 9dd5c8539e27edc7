#include "fidnav/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fidnav/units.hpp"

namespace fidnav {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

bool is_integer_ratio(double num, double den) {
  const double ratio = num / den;
  return std::abs(ratio - std::round(ratio)) < 1e-9 * ratio && std::round(ratio) >= 1.0;
}

}  // namespace

Covariance InitialUncertainty::covariance(const ImuSpec& imu) const {
  Eigen::Matrix<double, kErrorStates, 1> sigma;
  sigma.segment<3>(err::kPos).setConstant(position_m);
  sigma.segment<3>(err::kVel).setConstant(velocity_mps);
  sigma.segment<3>(err::kAtt).setConstant(units::deg_to_rad(attitude_deg));
  sigma.segment<3>(err::kAccBias).setConstant(imu.sigma_ss_a_si());
  sigma.segment<3>(err::kGyroBias).setConstant(imu.sigma_ss_g_si());
  sigma.segment<3>(err::kCamMount).setConstant(units::deg_to_rad(camera_mount_deg));
  return sigma.cwiseAbs2().asDiagonal();
}

void InitialUncertainty::validate() const {
  require(std::isfinite(position_m) && position_m >= 0.0, "filter.position_sigma_m must be >= 0");
  require(std::isfinite(velocity_mps) && velocity_mps >= 0.0,
          "filter.velocity_sigma_mps must be >= 0");
  require(std::isfinite(attitude_deg) && attitude_deg >= 0.0 && attitude_deg < 10.0,
          "filter.attitude_sigma_deg must be in [0, 10)");
  require(std::isfinite(camera_mount_deg) && camera_mount_deg >= 0.0 && camera_mount_deg < 10.0,
          "filter.camera_mount_sigma_deg must be in [0, 10)");
}

void ScenarioConfig::validate() const {
  trajectory.validate();
  require(std::isfinite(fiducial_spacing_m) && fiducial_spacing_m > 0.0,
          "fiducials.spacing_m must be positive");
  require(std::isfinite(cross_track_offset_m) && cross_track_offset_m >= 0.0,
          "fiducials.cross_track_offset_m must be nonnegative");
  imu.validate();
  camera.validate();
  gnss.validate();
  require(gnss.cutoff_altitude_m == trajectory.gnss_cutoff_altitude_m,
          "gnss.cutoff_altitude_m is inconsistent with the trajectory plan");
  initial.validate();
  require(std::isfinite(truth_rate_hz) && truth_rate_hz >= 50.0,
          "simulation.truth_rate_hz must be at least 50");
  require(is_integer_ratio(truth_rate_hz, camera.rate_hz),
          "camera.rate_hz must divide simulation.truth_rate_hz");
  require(is_integer_ratio(truth_rate_hz, gnss.rate_hz),
          "gnss.rate_hz must divide simulation.truth_rate_hz");
  require(std::isfinite(log_interval_s) && log_interval_s > 0.0,
          "simulation.log_interval_s must be positive");
  require(is_integer_ratio(log_interval_s, dt()),
          "simulation.log_interval_s must be a multiple of the truth step");
  require(is_integer_ratio(trajectory.duration_s, dt()),
          "trajectory.duration_s must be a multiple of the truth step");
  require(mc_runs >= 1, "monte_carlo.runs must be >= 1");
  require(containment_threshold > 0.0 && containment_threshold <= 1.0,
          "monte_carlo.containment_threshold must be in (0, 1]");
}

int ScenarioConfig::truth_steps() const {
  return static_cast<int>(std::lround(trajectory.duration_s * truth_rate_hz));
}

int ScenarioConfig::steps_per_sample(double rate_hz) const {
  return static_cast<int>(std::lround(truth_rate_hz / rate_hz));
}

int ScenarioConfig::log_decimation() const {
  return static_cast<int>(std::lround(log_interval_s * truth_rate_hz));
}

}  // namespace fidnav
