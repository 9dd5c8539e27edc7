// Command-line front end: validate | run | sweep | jacobians.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fidnav/config.hpp"
#include "fidnav/csv.hpp"
#include "fidnav/harness.hpp"
#include "fidnav/jacobian_audit.hpp"
#include "fidnav/sensitivity.hpp"

namespace fs = std::filesystem;
using namespace fidnav;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::string out_dir = "out";
  std::string fov;
  unsigned threads = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScenarioConfig resolve(const CommonOptions& o) {
  ScenarioConfig c = o.config_path.empty() ? parse_config("") : load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.runs) c.mc_runs = *o.runs;
  if (!o.fov.empty()) {
    const auto f = parse_fov_interpretation(o.fov);
    if (!f) throw UsageError("--fov-interpretation must be half-cone or full-cone");
    c.camera.fov_interpretation = *f;
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

fs::path prepare_out(const CommonOptions& o) {
  fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(fmt::format("{}: {}", dir.string(), ec.message()));
  return dir;
}

std::map<std::string, std::string> manifest_base(std::string_view command,
                                                 const ScenarioConfig& c) {
  return {{"command", std::string(command)},
          {"seed", std::to_string(c.seed)},
          {"imu_grade", std::string(to_string(c.imu_grade))},
          {"fov_interpretation", std::string(to_string(c.camera.fov_interpretation))}};
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("--values: '{}' is not a number", item));
    }
  }
  return out;
}

std::vector<ImuGrade> parse_grades(const std::string& text, ImuGrade base) {
  if (text.empty()) return {base};
  if (text == "all") return {ImuGrade::Commercial, ImuGrade::Tactical, ImuGrade::Navigation};
  std::vector<ImuGrade> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto g = parse_imu_grade(item);
    if (!g || *g == ImuGrade::Custom) {
      throw UsageError(fmt::format("--grades: unknown grade '{}'", item));
    }
    out.push_back(*g);
  }
  return out;
}

int cmd_validate(const CommonOptions& o) {
  const ScenarioConfig c = resolve(o);
  const fs::path dir = prepare_out(o);
  RunConfig rc = RunConfig::from_scenario(c, c.seed);
  const McSummary s = run_monte_carlo(rc, c.mc_runs, o.threads);
  write_mc_summary_csv(dir / "mc_summary.csv", s, c.containment_threshold);
  write_whiteness_csv(dir / "whiteness.csv", s.whiteness);

  bool ok = true;
  for (int i = 0; i < kErrorStates; ++i) {
    const bool pass = s.containment[i] >= c.containment_threshold;
    ok = ok && pass;
    fmt::print("{} {:<6} containment {:.4f} (>= {})\n", pass ? "PASS" : "FAIL",
               error_state_names()[i], s.containment[i], c.containment_threshold);
  }
  for (const auto& ch : s.whiteness.channels) {
    ok = ok && ch.pass();
    fmt::print("{} {:<6} residual n={} mean={:.4f} (|mean| <= {:.4f}) lags inside band {:.2f}\n",
               ch.pass() ? "PASS" : "FAIL", ch.name, ch.n, ch.mean, ch.mean_limit,
               ch.inside_fraction);
  }
  const bool growth = s.growth_violations == 0;
  ok = ok && growth && s.numerical_flags == 0;
  fmt::print("{} sigma growth between GNSS cutoff and first fiducial ({} of {} runs violate)\n",
             growth ? "PASS" : "FAIL", s.growth_violations, s.runs);
  fmt::print("{} numerical health ({} flags)\n", s.numerical_flags == 0 ? "PASS" : "FAIL",
             s.numerical_flags);
  for (const auto& f : s.flag_examples) fmt::print("  t={} {}\n", f.t, f.message);

  auto m = manifest_base("validate", c);
  m["runs"] = std::to_string(c.mc_runs);
  m["result"] = ok ? "pass" : "fail";
  m["files"] = "mc_summary.csv whiteness.csv";
  write_manifest(dir / "manifest.yaml", m);
  return ok ? kExitPass : kExitFail;
}

int cmd_run(const CommonOptions& o) {
  const ScenarioConfig c = resolve(o);
  const fs::path dir = prepare_out(o);
  RunConfig rc = RunConfig::from_scenario(c, c.seed);
  rc.record_measurements = true;
  const RunLog log = run_single(rc);
  write_trajectory_csv(dir / "trajectory.csv", log);
  write_fiducials_csv(dir / "fiducials.csv",
                      place_fiducials(c.trajectory, c.fiducial_spacing_m, c.cross_track_offset_m));
  write_measurements_csv(dir / "measurements.csv", log);
  write_filter_log_csv(dir / "filter_log.csv", log);
  write_errors_csv(dir / "errors.csv", log);
  write_residuals_csv(dir / "residuals.csv", log);

  fmt::print("gnss updates {}, los updates {}, gnss cutoff at {} s, first fiducial at {} s\n",
             log.gnss_updates, log.los_updates,
             log.gnss_cutoff_time ? fmt::format("{:.3f}", *log.gnss_cutoff_time) : "-",
             log.first_los_time ? fmt::format("{:.3f}", *log.first_los_time) : "-");
  for (const auto& f : log.flags) fmt::print("FLAG t={} {}\n", f.t, f.message);

  auto m = manifest_base("run", c);
  m["result"] = log.flags.empty() ? "pass" : "fail";
  m["files"] =
      "trajectory.csv fiducials.csv measurements.csv filter_log.csv errors.csv residuals.csv";
  write_manifest(dir / "manifest.yaml", m);
  return log.flags.empty() ? kExitPass : kExitFail;
}

int cmd_sweep(const CommonOptions& o, const std::string& param, const std::string& grades,
              const std::string& values) {
  const ScenarioConfig c = resolve(o);
  const auto p = parse_sweep_parameter(param);
  if (!p) throw UsageError(fmt::format("--param: unknown sweep parameter '{}'", param));
  SweepSpec spec = SweepSpec::defaults(*p);
  if (*p == SweepParameter::ImuGrade) {
    spec.grades = parse_grades(grades.empty() ? "all" : grades, c.imu_grade);
  } else {
    spec.grades = parse_grades(grades, c.imu_grade);
    if (!values.empty()) spec.values = parse_values(values);
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = prepare_out(o);
  const SweepResult r = run_sweep(spec, c, o.threads);
  write_sweep_csv(dir / "sweep.csv", r);
  const bool multi_grade = spec.grades.size() > 1;
  if (multi_grade) write_grade_gaps_csv(dir / "grade_gaps.csv", r);

  bool ok = true;
  for (const auto& pt : r.points) {
    if (!pt.ok) {
      ok = false;
      fmt::print("FAIL {}={} {}: {}\n", to_string(r.parameter), pt.value, to_string(pt.grade),
                 pt.message);
    }
  }
  for (const auto& v : grade_ordering_violations(r)) fmt::print("grade ordering: {}\n", v);
  if (*p == SweepParameter::FiducialSpacing || *p == SweepParameter::AltitudeAboveFiducials ||
      *p == SweepParameter::LosRate) {
    const bool increasing = *p != SweepParameter::LosRate;
    for (const auto& v : monotonic_exceptions(r, increasing)) {
      fmt::print("non-monotonic: {}\n", v);
    }
  }
  fmt::print("{} points written to {}\n", r.points.size(), (dir / "sweep.csv").string());

  auto m = manifest_base("sweep", c);
  m["parameter"] = std::string(to_string(r.parameter));
  m["points"] = std::to_string(r.points.size());
  m["result"] = ok ? "pass" : "fail";
  m["files"] = multi_grade ? "sweep.csv, grade_gaps.csv" : "sweep.csv";
  write_manifest(dir / "manifest.yaml", m);
  return ok ? kExitPass : kExitFail;
}

int cmd_jacobians(const CommonOptions& o, int samples) {
  const ScenarioConfig c = resolve(o);
  const fs::path dir = prepare_out(o);
  const JacobianAudit a = audit_jacobians(samples, c.seed, c.imu, c.camera);
  write_jacobians_csv(dir / "jacobians.csv", a);
  fmt::print("{} F max relative error {:.3e} (<= {:.0e})\n",
             a.max_f_rel_error <= a.tolerance ? "PASS" : "FAIL", a.max_f_rel_error, a.tolerance);
  fmt::print("{} H_LOS max relative error {:.3e} (<= {:.0e})\n",
             a.max_h_rel_error <= a.tolerance ? "PASS" : "FAIL", a.max_h_rel_error, a.tolerance);
  auto m = manifest_base("jacobians", c);
  m["samples"] = std::to_string(samples);
  m["result"] = a.pass() ? "pass" : "fail";
  m["files"] = "jacobians.csv";
  write_manifest(dir / "manifest.yaml", m);
  return a.pass() ? kExitPass : kExitFail;
}

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config_path, "Scenario YAML file (omitted fields use nominal values)")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "Base random seed (unsigned 64-bit)");
  sub->add_option("--out", o.out_dir, "Output directory for CSV files and manifest.yaml")
      ->capture_default_str();
  sub->add_option("--fov-interpretation", o.fov,
                  "How camera.fov_deg gates visibility: half-cone (off-boresight angle <= fov) "
                  "or full-cone (<= fov/2)")
      ->check(CLI::IsMember({"half-cone", "full-cone"}));
  sub->add_option("--threads", o.threads, "Worker threads, 0 = all hardware threads")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Fiducial-aided INS/GNSS navigation simulator.\n"
      "Units: m, m/s, s, Hz; angles in deg in configs; CSV headers carry unit suffixes."};
  app.require_subcommand(1);

  CommonOptions o;
  auto* validate = app.add_subcommand("validate", "Monte Carlo filter consistency suite");
  add_common(validate, o);
  validate->add_option("--runs", o.runs, "Number of Monte Carlo runs (default 200)");

  auto* run = app.add_subcommand("run", "Single noisy run with full logs");
  add_common(run, o);

  std::string param = "spacing";
  std::string grades;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Covariance sensitivity sweep of the steady-state 3-sigma metric (m)");
  add_common(sweep, o);
  sweep->add_option("--param", param,
                    "spacing (fiducial spacing, m) | grade (IMU grade) | altitude (height above "
                    "fiducials, m) | rate (LOS rate, Hz)")
      ->capture_default_str();
  sweep->add_option("--grades", grades,
                    "IMU grades: all or a comma list of commercial,tactical,navigation "
                    "(default: config grade)");
  sweep->add_option("--values", values,
                    "Comma-separated values in the parameter's unit (default grid: spacing "
                    "10..400 m by 10, altitude 10..20 m by 1, rate 1,2,5,10,20 Hz)");

  int samples = 100;
  auto* jac = app.add_subcommand("jacobians", "Finite-difference audit of F and H_LOS");
  add_common(jac, o);
  jac->add_option("--samples", samples, "Number of random states")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o, param, grades, values);
    if (*jac) return cmd_jacobians(o, samples);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
