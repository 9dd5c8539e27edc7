#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fidnav/config.hpp"
#include "fidnav/units.hpp"

using namespace fidnav;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, EmptyIsNominal) {
  const ScenarioConfig c = parse_config("");
  EXPECT_EQ(c, ScenarioConfig{});
  EXPECT_EQ(c.fiducial_spacing_m, 100.0);
  EXPECT_EQ(c.trajectory.cruise_altitude_m, 15.0);
  EXPECT_EQ(c.camera.rate_hz, 5.0);
  EXPECT_EQ(c.imu_grade, ImuGrade::Tactical);
  EXPECT_EQ(c.gnss.rate_hz, 1.0);
}

TEST(Config, FieldLevelErrors) {
  EXPECT_NE(error_of("fiducials:\n  spacing_m: -5\n").find("fiducials.spacing_m"),
            std::string::npos);
  EXPECT_NE(error_of("camera:\n  rate_hz: 5\n  zoom: 2\n").find("camera.zoom: unknown key"),
            std::string::npos);
  EXPECT_NE(error_of("banana: 1\n").find("banana"), std::string::npos);
  EXPECT_NE(error_of("imu:\n  grade: consumer\n").find("imu.grade"), std::string::npos);
  EXPECT_NE(error_of("gnss:\n  rate_hz: fast\n").find("gnss.rate_hz"), std::string::npos);
  EXPECT_NE(error_of("camera:\n  rate_hz: 3\n").find("camera.rate_hz"), std::string::npos);
  EXPECT_NE(error_of("seed: [1\n").find("parse error"), std::string::npos);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/scenario.yaml"), ConfigError);
}

TEST(Config, RoundTripNominal) {
  const ScenarioConfig c;
  EXPECT_EQ(parse_config(save_config(c)), c);
}

TEST(Config, RoundTripModified) {
  ScenarioConfig c;
  c.seed = 18446744073709551557ull;
  c.fiducial_spacing_m = 37.5;
  c.trajectory.cruise_altitude_m = 17.3;
  c.camera.fov_rad = units::deg_to_rad(33.3);
  c.camera.sigma_los = 1.1e-3 / 3.0;
  c.camera.fov_interpretation = FovInterpretation::FullCone;
  c.camera.d_b = Vec3(0.1, -0.02, 0.05);
  c.camera.q_cb = quat_from_euler(0.0, 0.1, 0.0);
  c.gnss.sigma_xyz = Vec3(0.7, 0.8, 2.9) / 3.0;
  c.imu.q_nu = 0.123;
  c.imu_grade = ImuGrade::Custom;
  c.initial.attitude_deg = 0.25;
  c.mc_runs = 17;
  const std::string text = save_config(c);
  const ScenarioConfig back = parse_config(text);
  EXPECT_EQ(back, c);
  EXPECT_EQ(save_config(back), text);
}

TEST(Config, ImuOverrideMakesCustom) {
  const ScenarioConfig c = parse_config("imu:\n  grade: navigation\n  arw_deg_per_sqrt_hr: 0.02\n");
  EXPECT_EQ(c.imu_grade, ImuGrade::Custom);
  EXPECT_EQ(c.imu.q_omega, 0.02);
  EXPECT_EQ(c.imu.q_nu, ImuSpec::preset(ImuGrade::Navigation).q_nu);
  EXPECT_EQ(parse_config("imu: {grade: commercial}").imu_grade, ImuGrade::Commercial);
}

TEST(Config, CutoffAppliesToTrajectory) {
  const ScenarioConfig c = parse_config("gnss:\n  cutoff_altitude_m: 50\n");
  EXPECT_EQ(c.trajectory.gnss_cutoff_altitude_m, 50.0);
}

TEST(Config, ShippedNominalFileMatchesDefaults) {
  const auto path = std::filesystem::path(FIDNAV_SOURCE_DIR) / "configs" / "nominal.yaml";
  EXPECT_EQ(load_config(path), ScenarioConfig{});
}
