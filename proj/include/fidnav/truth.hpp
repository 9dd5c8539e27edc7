#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fidnav/attitude.hpp"
#include "fidnav/random.hpp"

namespace fidnav {

/// Navigation-frame gravity, NED with down positive.
Vec3 gravity_ned();

// ============================================================================
// IMU specification
// ============================================================================

enum class ImuGrade { Commercial, Tactical, Navigation, Custom };

std::string_view to_string(ImuGrade grade);
/// Parses "commercial" | "tactical" | "navigation" | "custom".
std::optional<ImuGrade> parse_imu_grade(std::string_view name);

/// IMU error specification in datasheet units. Use the *_si() accessors
/// inside the models.
struct ImuSpec {
  double sigma_ss_a = 0.0;  // accel bias steady-state sigma, g
  double q_nu = 0.0;        // velocity random walk, (m/s)/sqrt(hr)
  double sigma_ss_g = 0.0;  // gyro bias steady-state sigma, deg/hr
  double q_omega = 0.0;     // angular random walk, deg/sqrt(hr)
  double tau_a = 100.0;     // accel bias time constant, s
  double tau_g = 100.0;     // gyro bias time constant, s

  static ImuSpec preset(ImuGrade grade, double tau_a = 100.0, double tau_g = 100.0);

  double sigma_ss_a_si() const;  // m/s^2
  double sigma_ss_g_si() const;  // rad/s
  double q_nu_si() const;        // m^2/s^3
  double q_omega_si() const;     // rad^2/s

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  bool operator==(const ImuSpec&) const = default;
};

// ============================================================================
// Truth state and IMU samples
// ============================================================================

struct TruthState {
  Vec3 p_n = Vec3::Zero();  // m
  Vec3 v_n = Vec3::Zero();  // m/s
  Quaternion q_bn;          // body -> NED
  Vec3 b_a = Vec3::Zero();  // m/s^2
  Vec3 b_g = Vec3::Zero();  // rad/s
  Quaternion q_cb;          // camera -> body, constant
};

struct TruthDerivative {
  Vec3 p_dot;
  Vec3 v_dot;
  Quaternion q_dot;
  Vec3 b_a_dot;
  Vec3 b_g_dot;
  Quaternion q_cb_dot;
};

/// Continuous bias process noise; zero for the deterministic part.
struct BiasNoise {
  Vec3 n_a = Vec3::Zero();
  Vec3 n_g = Vec3::Zero();
};

struct ImuSample {
  Vec3 nu_tilde = Vec3::Zero();     // specific force, m/s^2
  Vec3 omega_tilde = Vec3::Zero();  // angular rate, rad/s
  double t = 0.0;                   // s
};

/// Truth dynamics: position, velocity, attitude kinematics, ECRV biases and a
/// fixed camera mount.
TruthDerivative truth_derivative(const TruthState& x, const Vec3& nu_b, const Vec3& omega_b,
                                 const ImuSpec& spec, const BiasNoise& noise = {});

/// Advances the truth by dt with specific force and angular rate held constant.
/// Kinematics use RK4; biases use the exact discrete ECRV transition. With
/// rng == nullptr the bias driving noise is zero.
TruthState step_truth(const TruthState& x, const Vec3& nu_b, const Vec3& omega_b,
                      const ImuSpec& spec, double dt, Rng* rng = nullptr);

/// Corrupts true specific force and rate with the current biases and white
/// noise of per-axis standard deviation sqrt(q/dt).
ImuSample imu_sample(const TruthState& x, const Vec3& nu_b, const Vec3& omega_b,
                     const ImuSpec& spec, double dt, double t, Rng* rng = nullptr);

// ============================================================================
// Trajectory
// ============================================================================

/// Kinematic flight plan: level S-curve weaves at the start altitude, a smooth
/// constant-rate descent, then straight and level flight north over the
/// fiducial corridor.
struct TrajectoryPlan {
  double start_altitude_m = 120.0;
  double cruise_altitude_m = 15.0;     // above the fiducials (ground, down = 0)
  double ground_speed_mps = 15.0;      // northward speed
  double weave_amplitude_m = 40.0;     // east excursion envelope
  int weave_count = 2;
  double weave_duration_s = 30.0;
  double descent_start_s = 30.0;
  double descent_rate_mps = 4.7;
  double descent_transition_s = 3.0;   // smooth ramp in/out of the descent rate
  double duration_s = 105.0;
  double gnss_cutoff_altitude_m = 40.0;
  double corridor_start_m = 830.0;     // north coordinate of the first fiducial

  void validate() const;
  bool operator==(const TrajectoryPlan&) const = default;
};

struct ReferenceSample {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  Quaternion q_bn;
  Vec3 omega_b = Vec3::Zero();
};

/// Analytic, twice-differentiable reference built from a TrajectoryPlan.
class Trajectory {
 public:
  /// Throws std::invalid_argument for invalid plans, including any whose peak
  /// acceleration exceeds 3 g.
  explicit Trajectory(const TrajectoryPlan& plan);

  ReferenceSample sample(double t) const;
  const TrajectoryPlan& plan() const { return plan_; }

  double altitude(double t) const;
  /// Time at which the descent reaches cruise altitude.
  double level_off_time() const;
  /// First time the altitude drops to or below `altitude_m`, if ever.
  std::optional<double> crossing_time(double altitude_m) const;
  double max_acceleration() const;

 private:
  double drop(double t) const;
  double descent_speed(double t) const;
  double descent_accel(double t) const;

  TrajectoryPlan plan_;
  double cruise_length_s_ = 0.0;
};

/// Specific force and body rate that make a truth state follow the reference
/// acceleration and rate.
struct KinematicInput {
  Vec3 nu_b;
  Vec3 omega_b;
};
/// `ref` is sampled at the middle of the step; the specific force is resolved
/// in the body frame at the attitude the truth reaches at mid-step.
KinematicInput reference_input(const TruthState& x, const ReferenceSample& ref, double dt);

// ============================================================================
// Fiducials
// ============================================================================

struct Fiducial {
  int id = 0;
  Vec3 position_n = Vec3::Zero();
};

struct FiducialField {
  std::vector<Fiducial> fiducials;
  double along_track_spacing_m = 100.0;
  double cross_track_offset_m = 6.0;

  const Fiducial* find(int id) const;
};

/// Ground-level fiducials every `spacing_m` along the corridor from
/// plan.corridor_start_m to the final north position, alternating
/// +offset / -offset east of the ground trace.
FiducialField place_fiducials(const TrajectoryPlan& plan, double spacing_m, double offset_m);

}  // namespace fidnav
