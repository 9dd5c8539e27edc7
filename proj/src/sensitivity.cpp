#include "fidnav/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace fidnav {

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::FiducialSpacing: return "fiducial_spacing_m";
    case SweepParameter::ImuGrade: return "imu_grade";
    case SweepParameter::AltitudeAboveFiducials: return "altitude_above_fiducials_m";
    case SweepParameter::LosRate: return "los_rate_hz";
  }
  return "unknown";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
  if (name == "fiducial_spacing_m" || name == "spacing") return SweepParameter::FiducialSpacing;
  if (name == "imu_grade" || name == "grade") return SweepParameter::ImuGrade;
  if (name == "altitude_above_fiducials_m" || name == "altitude") {
    return SweepParameter::AltitudeAboveFiducials;
  }
  if (name == "los_rate_hz" || name == "rate") return SweepParameter::LosRate;
  return std::nullopt;
}

void SweepSpec::validate() const {
  if (parameter == SweepParameter::ImuGrade) {
    if (grades.empty()) throw std::invalid_argument("sweep: imu_grade sweep needs grades");
    return;
  }
  if (values.empty()) throw std::invalid_argument("sweep: values must be nonempty");
  for (const double v : values) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw std::invalid_argument(
          fmt::format("sweep: {} value {} must be positive", to_string(parameter), v));
    }
  }
}

SweepSpec SweepSpec::defaults(SweepParameter parameter) {
  SweepSpec s;
  s.parameter = parameter;
  switch (parameter) {
    case SweepParameter::FiducialSpacing:
      for (int m = 10; m <= 400; m += 10) s.values.push_back(m);
      break;
    case SweepParameter::ImuGrade:
      s.grades = {ImuGrade::Commercial, ImuGrade::Tactical, ImuGrade::Navigation};
      break;
    case SweepParameter::AltitudeAboveFiducials:
      for (int m = 10; m <= 20; ++m) s.values.push_back(m);
      break;
    case SweepParameter::LosRate:
      s.values = {1.0, 2.0, 5.0, 10.0, 20.0};
      break;
  }
  return s;
}

SteadyStateMetric steady_state_metric(const RunLog& log, double duration_s) {
  if (log.records.empty() || log.records.back().t < duration_s - 1e-9) {
    throw std::invalid_argument("steady_state_metric: log shorter than the scenario");
  }
  const double start = duration_s * 2.0 / 3.0;

  struct Sample {
    double t;
    double rss;
    Vec3 axis;
  };
  auto sample_of = [](const LogRecord& r) {
    const Vec3 axis = 3.0 * r.sigma.segment<3>(err::kPos);
    return Sample{r.t, axis.norm(), axis};
  };

  std::vector<Sample> window;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& r = log.records[i];
    if (r.t < start) continue;
    if (window.empty() && r.t > start && i > 0) {
      // Linear interpolation onto the window start.
      const Sample a = sample_of(log.records[i - 1]);
      const Sample b = sample_of(r);
      const double u = (start - a.t) / (b.t - a.t);
      window.push_back({start, a.rss + u * (b.rss - a.rss), a.axis + u * (b.axis - a.axis)});
    }
    window.push_back(sample_of(r));
    if (r.t >= duration_s) break;
  }

  SteadyStateMetric m;
  if (window.size() == 1) {
    m.rss_m = window.front().rss;
    m.axis_m = window.front().axis;
    return m;
  }
  double span = 0.0;
  for (std::size_t i = 1; i < window.size(); ++i) {
    const double h = window[i].t - window[i - 1].t;
    span += h;
    m.rss_m += 0.5 * h * (window[i].rss + window[i - 1].rss);
    m.axis_m += 0.5 * h * (window[i].axis + window[i - 1].axis);
  }
  m.rss_m /= span;
  m.axis_m /= span;
  return m;
}

SteadyStateMetric steady_state_metric(const RunLog& log) {
  return steady_state_metric(log, log.duration_s);
}

const SweepPoint* SweepResult::find(double value, ImuGrade grade) const {
  for (const auto& p : points) {
    if (p.grade == grade && std::abs(p.value - value) <= 1e-9 * std::max(1.0, std::abs(value))) {
      return &p;
    }
  }
  return nullptr;
}

ScenarioConfig apply_sweep_point(const ScenarioConfig& base, SweepParameter parameter,
                                 double value, ImuGrade grade) {
  ScenarioConfig sc = base;
  if (grade != base.imu_grade && grade != ImuGrade::Custom) {
    sc.imu_grade = grade;
    sc.imu = ImuSpec::preset(grade, base.imu.tau_a, base.imu.tau_g);
  }
  switch (parameter) {
    case SweepParameter::FiducialSpacing: sc.fiducial_spacing_m = value; break;
    case SweepParameter::ImuGrade: break;
    case SweepParameter::AltitudeAboveFiducials: sc.trajectory.cruise_altitude_m = value; break;
    case SweepParameter::LosRate: sc.camera.rate_hz = value; break;
  }
  return sc;
}

SweepPoint evaluate_sweep_point(const ScenarioConfig& base, SweepParameter parameter,
                                double value, ImuGrade grade) {
  SweepPoint point;
  point.value = value;
  point.grade = grade;
  try {
    RunConfig cfg = RunConfig::from_scenario(apply_sweep_point(base, parameter, value, grade),
                                             base.seed);
    cfg.noise = NoiseMode::CovarianceOnly;
    cfg.log_decimation = 1;
    const RunLog log = run_single(cfg);
    point.metric = steady_state_metric(log);
    point.los_updates = log.los_updates;
    const double start = log.duration_s * 2.0 / 3.0;
    std::set<int> seen;
    for (const auto& r : log.residuals) {
      if (r.kind == MeasKind::Los && r.t >= start) seen.insert(r.fiducial_id);
    }
    point.fiducials_seen = static_cast<int>(seen.size());
    if (!log.flags.empty()) {
      point.ok = false;
      point.message = log.flags.front().message;
    }
  } catch (const std::exception& e) {
    point.ok = false;
    point.message = e.what();
  }
  return point;
}

SweepResult run_sweep(const SweepSpec& spec, const ScenarioConfig& base, unsigned threads) {
  spec.validate();
  struct Job {
    double value;
    ImuGrade grade;
  };
  std::vector<Job> jobs;
  if (spec.parameter == SweepParameter::ImuGrade) {
    for (const auto g : spec.grades) jobs.push_back({0.0, g});
  } else {
    const std::vector<ImuGrade> grades =
        spec.grades.empty() ? std::vector<ImuGrade>{base.imu_grade} : spec.grades;
    for (const auto g : grades) {
      for (const double v : spec.values) jobs.push_back({v, g});
    }
  }
  SweepResult result;
  result.parameter = spec.parameter;
  result.points.resize(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), threads, [&](int i) {
    const Job& j = jobs[static_cast<std::size_t>(i)];
    result.points[static_cast<std::size_t>(i)] =
        evaluate_sweep_point(base, spec.parameter, j.value, j.grade);
  });
  return result;
}

std::vector<std::string> grade_ordering_violations(const SweepResult& result) {
  std::vector<std::string> out;
  std::set<double> values;
  for (const auto& p : result.points) values.insert(p.value);
  const ImuGrade order[] = {ImuGrade::Commercial, ImuGrade::Tactical, ImuGrade::Navigation};
  for (const double v : values) {
    for (int i = 0; i + 1 < 3; ++i) {
      const SweepPoint* worse = result.find(v, order[i]);
      const SweepPoint* better = result.find(v, order[i + 1]);
      if (worse == nullptr || better == nullptr) continue;
      if (!(worse->metric.rss_m >= better->metric.rss_m)) {
        out.push_back(fmt::format("{}={}: {} metric {} < {} metric {}", to_string(result.parameter),
                                  v, to_string(order[i]), worse->metric.rss_m,
                                  to_string(order[i + 1]), better->metric.rss_m));
      }
    }
  }
  return out;
}

std::vector<GradeGaps> grade_gaps(const SweepResult& result) {
  std::set<double> values;
  for (const auto& p : result.points) values.insert(p.value);
  auto gap = [&](double v, ImuGrade a, ImuGrade b) {
    const SweepPoint* pa = result.find(v, a);
    const SweepPoint* pb = result.find(v, b);
    if (pa == nullptr || pb == nullptr) return std::numeric_limits<double>::quiet_NaN();
    return pa->metric.rss_m - pb->metric.rss_m;
  };
  std::vector<GradeGaps> out;
  for (const double v : values) {
    GradeGaps g;
    g.value = v;
    g.commercial_tactical_m = gap(v, ImuGrade::Commercial, ImuGrade::Tactical);
    g.tactical_navigation_m = gap(v, ImuGrade::Tactical, ImuGrade::Navigation);
    g.commercial_navigation_m = gap(v, ImuGrade::Commercial, ImuGrade::Navigation);
    out.push_back(g);
  }
  return out;
}

std::vector<std::string> monotonic_exceptions(const SweepResult& result, bool expect_increasing) {
  std::vector<std::string> out;
  std::set<ImuGrade> grades;
  for (const auto& p : result.points) grades.insert(p.grade);
  for (const auto g : grades) {
    std::vector<const SweepPoint*> pts;
    for (const auto& p : result.points) {
      if (p.grade == g) pts.push_back(&p);
    }
    std::sort(pts.begin(), pts.end(),
              [](const SweepPoint* a, const SweepPoint* b) { return a->value < b->value; });
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double prev = pts[i - 1]->metric.rss_m;
      const double cur = pts[i]->metric.rss_m;
      const bool violates = expect_increasing ? cur < prev : cur > prev;
      if (violates) {
        out.push_back(fmt::format(
            "{} {}: {} -> {} metric {:.4f} -> {:.4f} m, fiducials in window {} -> {}, "
            "los updates {} -> {}",
            to_string(g), to_string(result.parameter), pts[i - 1]->value, pts[i]->value, prev, cur,
            pts[i - 1]->fiducials_seen, pts[i]->fiducials_seen, pts[i - 1]->los_updates,
            pts[i]->los_updates));
      }
    }
  }
  return out;
}

}  // namespace fidnav
