#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fidnav/truth.hpp"
#include "fidnav/units.hpp"

namespace fidnav {

namespace {

// C1 ramp 0 -> 1 with zero slope at both ends.
double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }
double smoothstep_slope(double u) { return 6.0 * u * (1.0 - u); }
double smoothstep_integral(double u) { return u * u * u - 0.5 * u * u * u * u; }

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

void TrajectoryPlan::validate() const {
  require(std::isfinite(start_altitude_m) && start_altitude_m > 0.0,
          "trajectory.start_altitude_m must be positive");
  require(std::isfinite(cruise_altitude_m) && cruise_altitude_m > 0.0,
          "trajectory.cruise_altitude_m must be positive");
  require(cruise_altitude_m < start_altitude_m,
          "trajectory.cruise_altitude_m must be below start_altitude_m");
  require(std::isfinite(ground_speed_mps) && ground_speed_mps > 0.0,
          "trajectory.ground_speed_mps must be positive");
  require(std::isfinite(weave_amplitude_m) && weave_amplitude_m >= 0.0,
          "trajectory.weave_amplitude_m must be nonnegative");
  require(weave_count >= 0, "trajectory.weave_count must be nonnegative");
  require(std::isfinite(weave_duration_s) && weave_duration_s > 0.0,
          "trajectory.weave_duration_s must be positive");
  require(std::isfinite(descent_start_s) && descent_start_s >= 0.0,
          "trajectory.descent_start_s must be nonnegative");
  require(weave_count == 0 || descent_start_s >= weave_duration_s,
          "trajectory.descent_start_s must not precede the end of the weaves");
  require(std::isfinite(descent_rate_mps) && descent_rate_mps > 0.0,
          "trajectory.descent_rate_mps must be positive");
  require(std::isfinite(descent_transition_s) && descent_transition_s > 0.0,
          "trajectory.descent_transition_s must be positive");
  require((start_altitude_m - cruise_altitude_m) / descent_rate_mps >= descent_transition_s,
          "trajectory.descent_transition_s too long for the altitude change");
  require(std::isfinite(duration_s) && duration_s > 0.0, "trajectory.duration_s must be positive");
  require(std::isfinite(gnss_cutoff_altitude_m) && gnss_cutoff_altitude_m > 0.0,
          "gnss.cutoff_altitude_m must be positive");
  require(gnss_cutoff_altitude_m < start_altitude_m,
          "gnss.cutoff_altitude_m must be below trajectory.start_altitude_m");
  require(std::isfinite(corridor_start_m), "fiducials.corridor_start_m must be finite");
}

Trajectory::Trajectory(const TrajectoryPlan& plan) : plan_(plan) {
  plan_.validate();
  const double drop_total = plan_.start_altitude_m - plan_.cruise_altitude_m;
  cruise_length_s_ = drop_total / plan_.descent_rate_mps - plan_.descent_transition_s;
  const double peak = max_acceleration();
  if (peak > 3.0 * units::kGravity) {
    throw std::invalid_argument("trajectory: peak acceleration " + std::to_string(peak) +
                                " m/s^2 exceeds 3 g");
  }
}

double Trajectory::descent_speed(double t) const {
  const double r = plan_.descent_rate_mps;
  const double tr = plan_.descent_transition_s;
  const double t1 = plan_.descent_start_s + tr;
  const double t2 = t1 + cruise_length_s_;
  const double t3 = t2 + tr;
  if (t <= plan_.descent_start_s || t >= t3) return 0.0;
  if (t < t1) return r * smoothstep((t - plan_.descent_start_s) / tr);
  if (t <= t2) return r;
  return r * (1.0 - smoothstep((t - t2) / tr));
}

double Trajectory::descent_accel(double t) const {
  const double r = plan_.descent_rate_mps;
  const double tr = plan_.descent_transition_s;
  const double t1 = plan_.descent_start_s + tr;
  const double t2 = t1 + cruise_length_s_;
  const double t3 = t2 + tr;
  if (t <= plan_.descent_start_s || t >= t3) return 0.0;
  if (t < t1) return r / tr * smoothstep_slope((t - plan_.descent_start_s) / tr);
  if (t <= t2) return 0.0;
  return -r / tr * smoothstep_slope((t - t2) / tr);
}

double Trajectory::drop(double t) const {
  const double r = plan_.descent_rate_mps;
  const double tr = plan_.descent_transition_s;
  const double t1 = plan_.descent_start_s + tr;
  const double t2 = t1 + cruise_length_s_;
  const double t3 = t2 + tr;
  if (t <= plan_.descent_start_s) return 0.0;
  if (t < t1) return r * tr * smoothstep_integral((t - plan_.descent_start_s) / tr);
  if (t <= t2) return r * (0.5 * tr + (t - t1));
  if (t < t3) {
    const double u = (t - t2) / tr;
    return r * (0.5 * tr + cruise_length_s_ + tr * (u - smoothstep_integral(u)));
  }
  return plan_.start_altitude_m - plan_.cruise_altitude_m;
}

double Trajectory::altitude(double t) const { return plan_.start_altitude_m - drop(t); }

double Trajectory::level_off_time() const {
  return plan_.descent_start_s + 2.0 * plan_.descent_transition_s + cruise_length_s_;
}

std::optional<double> Trajectory::crossing_time(double altitude_m) const {
  if (altitude_m >= plan_.start_altitude_m) return 0.0;
  if (altitude_m < plan_.cruise_altitude_m) return std::nullopt;
  // Altitude is non-increasing, so bisection on the descent interval is exact.
  double lo = plan_.descent_start_s;
  double hi = level_off_time();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (altitude(mid) > altitude_m) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

ReferenceSample Trajectory::sample(double t) const {
  ReferenceSample s;
  s.t = t;
  const double vn = plan_.ground_speed_mps;

  double east = 0.0, ve = 0.0, ae = 0.0;
  if (plan_.weave_count > 0 && t > 0.0 && t < plan_.weave_duration_s) {
    // A sin(w1 t) sin^2(w2 t): zero value, slope and curvature at both ends.
    const double w1 = 2.0 * std::numbers::pi * plan_.weave_count / plan_.weave_duration_s;
    const double w2 = std::numbers::pi / plan_.weave_duration_s;
    const double a = plan_.weave_amplitude_m;
    const double f = std::sin(w1 * t), fd = w1 * std::cos(w1 * t), fdd = -w1 * w1 * f;
    const double s2 = std::sin(w2 * t);
    const double g = s2 * s2;
    const double gd = w2 * std::sin(2.0 * w2 * t);
    const double gdd = 2.0 * w2 * w2 * std::cos(2.0 * w2 * t);
    east = a * f * g;
    ve = a * (fd * g + f * gd);
    ae = a * (fdd * g + 2.0 * fd * gd + f * gdd);
  }

  s.p = Vec3(vn * t, east, -altitude(t));
  s.v = Vec3(vn, ve, descent_speed(t));
  s.a = Vec3(0.0, ae, descent_accel(t));

  const double yaw = std::atan2(ve, vn);
  const double yaw_rate = vn * ae / (vn * vn + ve * ve);
  s.q_bn = Quaternion(std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw));
  s.omega_b = Vec3(0.0, 0.0, yaw_rate);
  return s;
}

double Trajectory::max_acceleration() const {
  double peak = 0.0;
  const int n = static_cast<int>(std::ceil(plan_.duration_s / 0.01));
  for (int i = 0; i <= n; ++i) {
    peak = std::max(peak, sample(std::min(i * 0.01, plan_.duration_s)).a.norm());
  }
  return peak;
}

KinematicInput reference_input(const TruthState& x, const ReferenceSample& ref, double dt) {
  const Quaternion q_mid =
      quat_mult(x.q_bn, Quaternion::from_axis_angle(0.5 * dt * ref.omega_b)).normalized();
  const Dcm t_nb = quat_to_dcm(q_mid).transpose();
  return {t_nb * (ref.a - gravity_ned()), ref.omega_b};
}

}  // namespace fidnav
