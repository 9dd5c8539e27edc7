#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fidnav/attitude.hpp"
#include "fidnav/random.hpp"
#include "fidnav/truth.hpp"

namespace fidnav {

using Vec2 = Eigen::Vector2d;

/// How the configured field-of-view angle maps to the visibility gate.
enum class FovInterpretation {
  HalfCone,  // gate angle off boresight == fov
  FullCone,  // gate angle off boresight == fov / 2
};

std::string_view to_string(FovInterpretation fov);
std::optional<FovInterpretation> parse_fov_interpretation(std::string_view name);

struct CameraModel {
  Quaternion q_cb;                        // camera -> body mount
  Vec3 d_b = Vec3::Zero();                // body-to-camera lever arm, m
  double fov_rad = 40.0 * 3.14159265358979323846 / 180.0;
  FovInterpretation fov_interpretation = FovInterpretation::HalfCone;
  double sigma_los = 3.64e-3 / 3.0;       // per-axis, tangent units
  double rate_hz = 5.0;

  double gate_angle() const;
  void validate() const;
  bool operator==(const CameraModel&) const = default;
};

struct GnssModel {
  Vec3 sigma_xyz = Vec3(1.0 / 3.0, 1.0 / 3.0, 1.0);  // m
  double rate_hz = 1.0;
  double cutoff_altitude_m = 40.0;

  bool available(const Vec3& p_n) const { return -p_n.z() > cutoff_altitude_m; }
  void validate() const;
  bool operator==(const GnssModel&) const = default;
};

struct GnssMeas {
  Vec3 z = Vec3::Zero();
  double t = 0.0;
};

struct LosMeas {
  Vec2 z = Vec2::Zero();
  int fiducial_id = 0;
  double t = 0.0;
};

/// Position fix, or nullopt at or below the cutoff altitude.
std::optional<GnssMeas> gnss_measure(const TruthState& x, const GnssModel& model, double t,
                                     Rng* rng = nullptr);

/// Camera-frame vector from the camera to the fiducial:
/// T_b^c [T_n^b (r_f - p) - d^b]. The camera mount is taken from the state.
Vec3 los_vector(const TruthState& x, const Vec3& fiducial_n, const Vec3& d_b);

/// Pinhole projection (l_x / l_z, l_y / l_z). Throws std::domain_error if
/// l_z <= 0.
Vec2 project(const Vec3& los_c);

/// Image-plane measurement of a fiducial. Throws std::domain_error if the
/// fiducial is behind the camera, which means visibility gating was skipped.
LosMeas los_measure(const TruthState& x, const Fiducial& fiducial, const CameraModel& camera,
                    double t, Rng* rng = nullptr);

/// Ids of fiducials inside the gate cone with positive depth.
std::vector<int> visible_fiducials(const TruthState& x, const FiducialField& field,
                                   const CameraModel& camera);

}  // namespace fidnav
