#pragma once

#include <numbers>

// Every conversion from datasheet units to SI goes through here.
namespace fidnav::units {

inline constexpr double kGravity = 9.80665;  // m/s^2
inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSqrtSecondsPerHour = 60.0;

constexpr double g_to_mps2(double g) { return g * kGravity; }
constexpr double deg_to_rad(double deg) { return deg * kDegToRad; }
constexpr double rad_to_deg(double rad) { return rad * kRadToDeg; }

/// deg/hr -> rad/s
constexpr double deg_per_hr_to_rad_per_s(double dph) { return dph * kDegToRad / kSecondsPerHour; }

/// Velocity random walk (m/s)/sqrt(hr) -> white-noise PSD in m^2/s^3.
constexpr double vrw_to_psd(double mps_per_rthr) {
  const double root = mps_per_rthr / kSqrtSecondsPerHour;
  return root * root;
}

/// Angular random walk deg/sqrt(hr) -> white-noise PSD in rad^2/s.
constexpr double arw_to_psd(double deg_per_rthr) {
  const double root = deg_per_rthr * kDegToRad / kSqrtSecondsPerHour;
  return root * root;
}

}  // namespace fidnav::units
