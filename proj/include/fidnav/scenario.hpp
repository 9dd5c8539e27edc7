#pragma once

#include <cstdint>

#include "fidnav/ekf.hpp"
#include "fidnav/sensors.hpp"
#include "fidnav/truth.hpp"

namespace fidnav {

/// Initial estimation uncertainty. Bias variances come from the IMU spec.
struct InitialUncertainty {
  double position_m = 1.0;
  double velocity_mps = 0.1;
  double attitude_deg = 0.5;
  double camera_mount_deg = 0.1;

  Covariance covariance(const ImuSpec& imu) const;
  void validate() const;
  bool operator==(const InitialUncertainty&) const = default;
};

/// Everything needed to reproduce a scenario. Defaults are the nominal
/// fiducial-corridor flight with a tactical-grade IMU.
struct ScenarioConfig {
  TrajectoryPlan trajectory;
  double fiducial_spacing_m = 100.0;
  double cross_track_offset_m = 6.0;
  ImuGrade imu_grade = ImuGrade::Tactical;
  ImuSpec imu = ImuSpec::preset(ImuGrade::Tactical);
  CameraModel camera;
  GnssModel gnss;
  InitialUncertainty initial;
  double truth_rate_hz = 200.0;
  double log_interval_s = 0.1;
  std::uint64_t seed = 1;
  int mc_runs = 200;
  double containment_threshold = 0.97;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  double dt() const { return 1.0 / truth_rate_hz; }
  int truth_steps() const;
  /// Truth steps between consecutive events of a sensor at `rate_hz`.
  int steps_per_sample(double rate_hz) const;
  int log_decimation() const;

  bool operator==(const ScenarioConfig&) const = default;
};

}  // namespace fidnav
