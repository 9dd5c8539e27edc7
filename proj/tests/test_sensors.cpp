#include <cmath>

#include <gtest/gtest.h>

#include "fidnav/random.hpp"
#include "fidnav/sensors.hpp"
#include "fidnav/units.hpp"

using namespace fidnav;

namespace {

TruthState at(const Vec3& p) {
  TruthState x;
  x.p_n = p;
  return x;
}

}  // namespace

TEST(Gnss, NoiselessReturnsPosition) {
  const TruthState x = at(Vec3(3.0, -4.0, -120.0));
  const auto m = gnss_measure(x, GnssModel{}, 1.0);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->z, x.p_n);
}

TEST(Gnss, UnavailableBelowCutoff) {
  EXPECT_FALSE(gnss_measure(at(Vec3(0, 0, -35.0)), GnssModel{}, 0.0).has_value());
  EXPECT_FALSE(gnss_measure(at(Vec3(0, 0, -40.0)), GnssModel{}, 0.0).has_value());
}

TEST(Gnss, NoiseStd) {
  Rng rng(4);
  const TruthState x = at(Vec3(0, 0, -120.0));
  Vec3 s2 = Vec3::Zero();
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    s2 += (gnss_measure(x, GnssModel{}, 0.0, &rng)->z - x.p_n).cwiseAbs2();
  }
  const Vec3 sd = (s2 / n).cwiseSqrt();
  EXPECT_NEAR(sd.x() / (1.0 / 3.0), 1.0, 0.02);
  EXPECT_NEAR(sd.y() / (1.0 / 3.0), 1.0, 0.02);
  EXPECT_NEAR(sd.z() / 1.0, 1.0, 0.02);
}

TEST(Los, NadirAndOffsetGeometry) {
  const TruthState x = at(Vec3(0, 0, -15.0));
  EXPECT_EQ(los_vector(x, Vec3::Zero(), Vec3::Zero()), Vec3(0, 0, 15));
  EXPECT_EQ(los_vector(x, Vec3(0, 6, 0), Vec3::Zero()), Vec3(0, 6, 15));
  EXPECT_EQ(los_vector(x, Vec3::Zero(), Vec3(0.1, 0, 0)), Vec3(-0.1, 0, 15));
}

TEST(Los, Projection) {
  const TruthState x = at(Vec3(0, 0, -15.0));
  CameraModel cam;
  Fiducial nadir;
  Fiducial offset{1, Vec3(0, 6, 0)};
  EXPECT_EQ(los_measure(x, nadir, cam, 0.0).z, Vec2(0, 0));
  const Vec2 z = los_measure(x, offset, cam, 0.0).z;
  EXPECT_DOUBLE_EQ(z.x(), 0.0);
  EXPECT_DOUBLE_EQ(z.y(), 0.4);
  EXPECT_THROW(project(Vec3(1, 0, 0)), std::domain_error);
  EXPECT_THROW(los_measure(at(Vec3(0, 0, 5.0)), nadir, cam, 0.0), std::domain_error);
}

TEST(Los, NoiseStd) {
  Rng rng(12);
  const TruthState x = at(Vec3(0, 0, -15.0));
  CameraModel cam;
  double s2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) s2 += los_measure(x, Fiducial{}, cam, 0.0, &rng).z.squaredNorm();
  EXPECT_NEAR(std::sqrt(s2 / (2.0 * n)) / (3.64e-3 / 3.0), 1.0, 0.02);
}

TEST(Visibility, GateCases) {
  CameraModel cam;
  FiducialField field;
  field.fiducials = {{0, Vec3(0, 0, 0)}, {1, Vec3(0, 6, 0)}};
  const auto ids = visible_fiducials(at(Vec3(0, 0, -15.0)), field, cam);
  EXPECT_EQ(ids, (std::vector<int>{0, 1}));  // 1 sits 21.8 deg off boresight

  // 30 deg off boresight against a 20 deg gate.
  cam.fov_rad = units::deg_to_rad(20.0);
  field.fiducials = {{0, Vec3(0, 15.0 * std::tan(units::deg_to_rad(30.0)), 0)}};
  EXPECT_TRUE(visible_fiducials(at(Vec3(0, 0, -15.0)), field, cam).empty());

  cam.fov_rad = units::deg_to_rad(1.0);
  field.fiducials = {{0, Vec3::Zero()}};
  EXPECT_EQ(visible_fiducials(at(Vec3(0, 0, -15.0)), field, cam).size(), 1u);
}

TEST(Visibility, FullConeHalvesTheGate) {
  CameraModel cam;
  cam.fov_interpretation = FovInterpretation::FullCone;
  EXPECT_DOUBLE_EQ(cam.gate_angle(), units::deg_to_rad(20.0));
  FiducialField field;
  field.fiducials = {{1, Vec3(0, 6, 0)}};
  EXPECT_TRUE(visible_fiducials(at(Vec3(0, 0, -15.0)), field, cam).empty());
  EXPECT_EQ(parse_fov_interpretation("full-cone"), FovInterpretation::FullCone);
  EXPECT_FALSE(parse_fov_interpretation("cone"));
}
