#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fidnav/harness.hpp"
#include "fidnav/scenario.hpp"

namespace fidnav {

enum class SweepParameter { FiducialSpacing, ImuGrade, AltitudeAboveFiducials, LosRate };

std::string_view to_string(SweepParameter p);
/// Accepts the canonical names (fiducial_spacing_m, imu_grade,
/// altitude_above_fiducials_m, los_rate_hz) and the short forms spacing,
/// grade, altitude, rate.
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::FiducialSpacing;
  std::vector<double> values;     // unused for ImuGrade sweeps
  std::vector<ImuGrade> grades;   // crossed with `values`; empty = base grade

  void validate() const;
  /// Default grid for a parameter: spacing 10..400 m by 10, altitude
  /// 10..20 m by 1, LOS rate {1, 2, 5, 10, 20} Hz.
  static SweepSpec defaults(SweepParameter parameter);
};

struct SteadyStateMetric {
  double rss_m = 0.0;                     // mean RSS position 3-sigma
  Vec3 axis_m = Vec3::Zero();             // mean per-axis position 3-sigma
};

/// Time average of the position 3-sigma over the final third of the
/// scenario, trapezoidal between log records. Throws std::invalid_argument if
/// the log ends before `duration_s`.
SteadyStateMetric steady_state_metric(const RunLog& log, double duration_s);
SteadyStateMetric steady_state_metric(const RunLog& log);

struct SweepPoint {
  double value = 0.0;
  ImuGrade grade = ImuGrade::Tactical;
  SteadyStateMetric metric;
  int los_updates = 0;
  int fiducials_seen = 0;  // distinct fiducials processed in the metric window
  bool ok = true;
  std::string message;
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::FiducialSpacing;
  std::vector<SweepPoint> points;

  const SweepPoint* find(double value, ImuGrade grade) const;
};

/// Scenario with one sweep coordinate applied.
ScenarioConfig apply_sweep_point(const ScenarioConfig& base, SweepParameter parameter,
                                 double value, ImuGrade grade);

/// Covariance-only run of one grid point.
SweepPoint evaluate_sweep_point(const ScenarioConfig& base, SweepParameter parameter,
                                double value, ImuGrade grade);

/// One covariance simulation per grid point. A failing point is recorded
/// with ok = false and the sweep continues.
SweepResult run_sweep(const SweepSpec& spec, const ScenarioConfig& base, unsigned threads = 0);

/// Values (per grade pair) where the metric ordering commercial >= tactical
/// >= navigation fails.
std::vector<std::string> grade_ordering_violations(const SweepResult& result);

/// Pairwise metric differences between grades at one swept value; NaN where
/// either grade is missing from the sweep.
struct GradeGaps {
  double value = 0.0;
  double commercial_tactical_m = 0.0;
  double tactical_navigation_m = 0.0;
  double commercial_navigation_m = 0.0;
};

/// One entry per distinct swept value, in ascending order.
std::vector<GradeGaps> grade_gaps(const SweepResult& result);

/// Adjacent points where the metric increases with the swept value, each
/// described with the fiducial counts that explain it.
std::vector<std::string> monotonic_exceptions(const SweepResult& result, bool expect_increasing);

}  // namespace fidnav
