#include "fidnav/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "fidnav/units.hpp"

namespace fidnav {

namespace {

using Keys = std::initializer_list<std::string_view>;

std::string join(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

void check_map(const YAML::Node& node, const std::string& path, Keys allowed) {
  if (!node.IsMap()) throw ConfigError(fmt::format("{}: expected a mapping", path));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool known = false;
    for (const auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError(fmt::format("{}: unknown key", join(path, key)));
  }
}

template <typename T>
void read(const YAML::Node& parent, const std::string& path, std::string_view key, T& out) {
  const YAML::Node n = parent[std::string(key)];
  if (!n) return;
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}: cannot parse '{}'", join(path, key),
                                  n.IsScalar() ? n.Scalar() : std::string("<non-scalar>")));
  }
}

template <int N>
void read_vector(const YAML::Node& parent, const std::string& path, std::string_view key,
                 Eigen::Matrix<double, N, 1>& out) {
  const YAML::Node n = parent[std::string(key)];
  if (!n) return;
  if (!n.IsSequence() || n.size() != N) {
    throw ConfigError(fmt::format("{}: expected a list of {} numbers", join(path, key), N));
  }
  for (int i = 0; i < N; ++i) {
    try {
      out(i) = n[i].as<double>();
    } catch (const YAML::Exception&) {
      throw ConfigError(fmt::format("{}[{}]: not a number", join(path, key), i));
    }
  }
}

// Reads a value given in display units and stores to_internal(value).
void read_scaled(const YAML::Node& parent, const std::string& path, std::string_view key,
                 double& out, const std::function<double(double)>& to_internal) {
  double v = 0.0;
  const YAML::Node n = parent[std::string(key)];
  if (!n) return;
  read(parent, path, key, v);
  out = to_internal(v);
}

// Display-unit value d with to_internal(d) == internal exactly, when one
// exists within a few ulps of the direct conversion.
double exact_display(double internal, const std::function<double(double)>& to_internal,
                     const std::function<double(double)>& to_display) {
  const double guess = to_display(internal);
  double lo = guess;
  double hi = guess;
  for (int i = 0; i < 16; ++i) {
    if (to_internal(hi) == internal) return hi;
    if (to_internal(lo) == internal) return lo;
    hi = std::nextafter(hi, INFINITY);
    lo = std::nextafter(lo, -INFINITY);
  }
  return guess;
}

double deg_to_rad(double d) { return units::deg_to_rad(d); }
double rad_to_deg(double r) { return units::rad_to_deg(r); }
double mrad3_to_sigma(double v) { return v * 1e-3 / 3.0; }
double sigma_to_mrad3(double s) { return s * 3.0 / 1e-3; }
double three_sigma_to_sigma(double v) { return v / 3.0; }
double sigma_to_three_sigma(double s) { return 3.0 * s; }

std::string num(double v) { return fmt::format("{}", v); }

std::string vec(const Vec3& v) { return fmt::format("[{}, {}, {}]", v.x(), v.y(), v.z()); }

ScenarioConfig parse_root(const YAML::Node& root) {
  ScenarioConfig c;
  if (!root || root.IsNull()) {
    c.validate();
    return c;
  }
  check_map(root, "", {"seed", "trajectory", "fiducials", "imu", "camera", "gnss", "filter",
                       "simulation", "monte_carlo"});
  read(root, "", "seed", c.seed);

  if (const auto n = root["trajectory"]) {
    const std::string p = "trajectory";
    check_map(n, p, {"start_altitude_m", "cruise_altitude_m", "ground_speed_mps",
                     "weave_amplitude_m", "weave_count", "weave_duration_s", "descent_start_s",
                     "descent_rate_mps", "descent_transition_s", "duration_s"});
    auto& t = c.trajectory;
    read(n, p, "start_altitude_m", t.start_altitude_m);
    read(n, p, "cruise_altitude_m", t.cruise_altitude_m);
    read(n, p, "ground_speed_mps", t.ground_speed_mps);
    read(n, p, "weave_amplitude_m", t.weave_amplitude_m);
    read(n, p, "weave_count", t.weave_count);
    read(n, p, "weave_duration_s", t.weave_duration_s);
    read(n, p, "descent_start_s", t.descent_start_s);
    read(n, p, "descent_rate_mps", t.descent_rate_mps);
    read(n, p, "descent_transition_s", t.descent_transition_s);
    read(n, p, "duration_s", t.duration_s);
  }

  if (const auto n = root["fiducials"]) {
    const std::string p = "fiducials";
    check_map(n, p, {"spacing_m", "cross_track_offset_m", "corridor_start_m"});
    read(n, p, "spacing_m", c.fiducial_spacing_m);
    read(n, p, "cross_track_offset_m", c.cross_track_offset_m);
    read(n, p, "corridor_start_m", c.trajectory.corridor_start_m);
  }

  if (const auto n = root["imu"]) {
    const std::string p = "imu";
    check_map(n, p, {"grade", "accel_bias_sigma_g", "vrw_mps_per_sqrt_hr",
                     "gyro_bias_sigma_deg_per_hr", "arw_deg_per_sqrt_hr", "tau_accel_s",
                     "tau_gyro_s"});
    std::string grade_name(to_string(c.imu_grade));
    read(n, p, "grade", grade_name);
    const auto grade = parse_imu_grade(grade_name);
    if (!grade) {
      throw ConfigError(fmt::format(
          "imu.grade: unknown grade '{}' (commercial, tactical, navigation, custom)", grade_name));
    }
    double tau_a = c.imu.tau_a;
    double tau_g = c.imu.tau_g;
    read(n, p, "tau_accel_s", tau_a);
    read(n, p, "tau_gyro_s", tau_g);
    c.imu = ImuSpec::preset(*grade, tau_a, tau_g);
    const ImuSpec preset = c.imu;
    read(n, p, "accel_bias_sigma_g", c.imu.sigma_ss_a);
    read(n, p, "vrw_mps_per_sqrt_hr", c.imu.q_nu);
    read(n, p, "gyro_bias_sigma_deg_per_hr", c.imu.sigma_ss_g);
    read(n, p, "arw_deg_per_sqrt_hr", c.imu.q_omega);
    c.imu_grade = c.imu == preset ? *grade : ImuGrade::Custom;
  }

  if (const auto n = root["camera"]) {
    const std::string p = "camera";
    check_map(n, p, {"rate_hz", "fov_deg", "fov_interpretation", "sigma_3sigma_mrad",
                     "lever_arm_m", "mount_quaternion"});
    auto& cam = c.camera;
    read(n, p, "rate_hz", cam.rate_hz);
    read_scaled(n, p, "fov_deg", cam.fov_rad, deg_to_rad);
    std::string fov(to_string(cam.fov_interpretation));
    read(n, p, "fov_interpretation", fov);
    const auto interp = parse_fov_interpretation(fov);
    if (!interp) {
      throw ConfigError(fmt::format(
          "camera.fov_interpretation: unknown value '{}' (half-cone, full-cone)", fov));
    }
    cam.fov_interpretation = *interp;
    read_scaled(n, p, "sigma_3sigma_mrad", cam.sigma_los, mrad3_to_sigma);
    read_vector<3>(n, p, "lever_arm_m", cam.d_b);
    Eigen::Vector4d q(cam.q_cb.w, cam.q_cb.x, cam.q_cb.y, cam.q_cb.z);
    read_vector<4>(n, p, "mount_quaternion", q);
    if (std::abs(q.norm() - 1.0) > 1e-9) {
      throw ConfigError("camera.mount_quaternion: must have unit norm [w, x, y, z]");
    }
    cam.q_cb = Quaternion(q(0), q(1), q(2), q(3));
  }

  if (const auto n = root["gnss"]) {
    const std::string p = "gnss";
    check_map(n, p, {"rate_hz", "sigma_3sigma_m", "cutoff_altitude_m"});
    read(n, p, "rate_hz", c.gnss.rate_hz);
    Vec3 three = c.gnss.sigma_xyz * 3.0;
    if (n["sigma_3sigma_m"]) {
      read_vector<3>(n, p, "sigma_3sigma_m", three);
      c.gnss.sigma_xyz = three.unaryExpr(&three_sigma_to_sigma);
    }
    read(n, p, "cutoff_altitude_m", c.gnss.cutoff_altitude_m);
    c.trajectory.gnss_cutoff_altitude_m = c.gnss.cutoff_altitude_m;
  }

  if (const auto n = root["filter"]) {
    const std::string p = "filter";
    check_map(n, p, {"position_sigma_m", "velocity_sigma_mps", "attitude_sigma_deg",
                     "camera_mount_sigma_deg"});
    read(n, p, "position_sigma_m", c.initial.position_m);
    read(n, p, "velocity_sigma_mps", c.initial.velocity_mps);
    read(n, p, "attitude_sigma_deg", c.initial.attitude_deg);
    read(n, p, "camera_mount_sigma_deg", c.initial.camera_mount_deg);
  }

  if (const auto n = root["simulation"]) {
    const std::string p = "simulation";
    check_map(n, p, {"truth_rate_hz", "log_interval_s"});
    read(n, p, "truth_rate_hz", c.truth_rate_hz);
    read(n, p, "log_interval_s", c.log_interval_s);
  }

  if (const auto n = root["monte_carlo"]) {
    const std::string p = "monte_carlo";
    check_map(n, p, {"runs", "containment_threshold"});
    read(n, p, "runs", c.mc_runs);
    read(n, p, "containment_threshold", c.containment_threshold);
  }

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

}  // namespace

ScenarioConfig parse_config(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("parse error at line {}: {}", e.mark.line + 1, e.msg));
  }
  return parse_root(root);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string save_config(const ScenarioConfig& c) {
  const auto& t = c.trajectory;
  const auto& cam = c.camera;
  const Vec3 gnss3 = c.gnss.sigma_xyz.unaryExpr([](double s) {
    return exact_display(s, three_sigma_to_sigma, sigma_to_three_sigma);
  });
  std::string out;
  auto line = [&out](const std::string& s) { out += s + "\n"; };
  line("# Fiducial-corridor navigation scenario. NED frame, fiducials on the ground (down = 0).");
  line(fmt::format("seed: {}  # base seed; Monte Carlo run i uses a seed derived from it", c.seed));
  line("trajectory:");
  line(fmt::format("  start_altitude_m: {}", num(t.start_altitude_m)));
  line(fmt::format("  cruise_altitude_m: {}  # height above the fiducials", num(t.cruise_altitude_m)));
  line(fmt::format("  ground_speed_mps: {}  # northward", num(t.ground_speed_mps)));
  line(fmt::format("  weave_amplitude_m: {}  # east excursion of the initial S-turns", num(t.weave_amplitude_m)));
  line(fmt::format("  weave_count: {}  # full S-turn periods", t.weave_count));
  line(fmt::format("  weave_duration_s: {}", num(t.weave_duration_s)));
  line(fmt::format("  descent_start_s: {}", num(t.descent_start_s)));
  line(fmt::format("  descent_rate_mps: {}", num(t.descent_rate_mps)));
  line(fmt::format("  descent_transition_s: {}  # smooth ramp into and out of the descent", num(t.descent_transition_s)));
  line(fmt::format("  duration_s: {}", num(t.duration_s)));
  line("fiducials:");
  line(fmt::format("  spacing_m: {}  # along-track", num(c.fiducial_spacing_m)));
  line(fmt::format("  cross_track_offset_m: {}  # alternating east/west", num(c.cross_track_offset_m)));
  line(fmt::format("  corridor_start_m: {}  # north coordinate of the first fiducial", num(t.corridor_start_m)));
  line("imu:");
  line(fmt::format("  grade: {}  # commercial | tactical | navigation | custom", to_string(c.imu_grade)));
  line(fmt::format("  accel_bias_sigma_g: {}  # steady-state 1-sigma, g", num(c.imu.sigma_ss_a)));
  line(fmt::format("  vrw_mps_per_sqrt_hr: {}  # velocity random walk, (m/s)/sqrt(hr)", num(c.imu.q_nu)));
  line(fmt::format("  gyro_bias_sigma_deg_per_hr: {}  # steady-state 1-sigma, deg/hr", num(c.imu.sigma_ss_g)));
  line(fmt::format("  arw_deg_per_sqrt_hr: {}  # angle random walk, deg/sqrt(hr)", num(c.imu.q_omega)));
  line(fmt::format("  tau_accel_s: {}  # bias correlation time", num(c.imu.tau_a)));
  line(fmt::format("  tau_gyro_s: {}", num(c.imu.tau_g)));
  line("camera:");
  line(fmt::format("  rate_hz: {}  # LOS measurement rate, must divide truth_rate_hz", num(cam.rate_hz)));
  line(fmt::format("  fov_deg: {}", num(exact_display(cam.fov_rad, deg_to_rad, rad_to_deg))));
  line(fmt::format("  fov_interpretation: {}  # half-cone: fov is the off-boresight gate; full-cone: fov/2",
                   to_string(cam.fov_interpretation)));
  line(fmt::format("  sigma_3sigma_mrad: {}  # per-axis LOS noise, 3-sigma, mrad",
                   num(exact_display(cam.sigma_los, mrad3_to_sigma, sigma_to_mrad3))));
  line(fmt::format("  lever_arm_m: {}  # camera origin in body axes", vec(cam.d_b)));
  line(fmt::format("  mount_quaternion: [{}, {}, {}, {}]  # camera-to-body, scalar first",
                   cam.q_cb.w, cam.q_cb.x, cam.q_cb.y, cam.q_cb.z));
  line("gnss:");
  line(fmt::format("  rate_hz: {}", num(c.gnss.rate_hz)));
  line(fmt::format("  sigma_3sigma_m: {}  # north, east, down 3-sigma", vec(gnss3)));
  line(fmt::format("  cutoff_altitude_m: {}  # no fixes at or below this altitude", num(c.gnss.cutoff_altitude_m)));
  line("filter:  # initial 1-sigma estimation errors");
  line(fmt::format("  position_sigma_m: {}", num(c.initial.position_m)));
  line(fmt::format("  velocity_sigma_mps: {}", num(c.initial.velocity_mps)));
  line(fmt::format("  attitude_sigma_deg: {}", num(c.initial.attitude_deg)));
  line(fmt::format("  camera_mount_sigma_deg: {}", num(c.initial.camera_mount_deg)));
  line("simulation:");
  line(fmt::format("  truth_rate_hz: {}", num(c.truth_rate_hz)));
  line(fmt::format("  log_interval_s: {}", num(c.log_interval_s)));
  line("monte_carlo:");
  line(fmt::format("  runs: {}", c.mc_runs));
  line(fmt::format("  containment_threshold: {}  # required fraction of samples inside 3-sigma",
                   num(c.containment_threshold)));
  return out;
}

}  // namespace fidnav
