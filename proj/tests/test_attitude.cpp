#include <cmath>

#include <gtest/gtest.h>

#include "fidnav/attitude.hpp"
#include "fidnav/random.hpp"

using namespace fidnav;

namespace {

Quaternion random_unit(Rng& rng) {
  return Quaternion(rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()).normalized();
}

void expect_quat_near(const Quaternion& a, const Quaternion& b, double tol) {
  EXPECT_NEAR(a.w, b.w, tol);
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

}  // namespace

TEST(QuatMult, IdentityOnRight) {
  const Quaternion q(0.1, -0.7, 0.3, 0.2);
  EXPECT_EQ(quat_mult(q, Quaternion::identity()), q);
}

TEST(QuatMult, HandEvaluatedProduct) {
  const double s = std::sqrt(0.5);
  const Quaternion p = quat_mult(Quaternion(s, s, 0, 0), Quaternion(s, 0, s, 0));
  expect_quat_near(p, Quaternion(0.5, 0.5, 0.5, 0.5), 1e-15);
}

TEST(QuatMult, RandomPropertiesHold) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Quaternion a = random_unit(rng);
    const Quaternion b = random_unit(rng);
    const Quaternion c = random_unit(rng);
    EXPECT_NEAR(quat_mult(a, b).norm(), 1.0, 1e-14);
    expect_quat_near(quat_mult(quat_mult(a, b), c), quat_mult(a, quat_mult(b, c)), 1e-14);
    const Dcm lhs = quat_to_dcm(quat_mult(a, b));
    const Dcm rhs = quat_to_dcm(a) * quat_to_dcm(b);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(QuatToDcm, IdentityQuaternion) {
  EXPECT_TRUE(quat_to_dcm(Quaternion::identity()).isApprox(Mat3::Identity(), 0.0));
}

TEST(QuatToDcm, NinetyDegreesAboutZMapsXToY) {
  const Dcm r = quat_to_dcm(Quaternion::from_axis_angle(Vec3(0, 0, M_PI / 2)));
  EXPECT_LT((r * Vec3::UnitX() - Vec3::UnitY()).norm(), 1e-15);
}

TEST(QuatToDcm, DoubleCover) {
  Rng rng(5);
  const Quaternion q = random_unit(rng);
  EXPECT_LT((quat_to_dcm(q) - quat_to_dcm(-q)).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(QuatToDcm, RejectsNonUnit) {
  EXPECT_THROW(quat_to_dcm(Quaternion(1.0, 0.01, 0, 0)), std::invalid_argument);
}

TEST(QuatToDcm, OrthonormalForRandomInputs) {
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const Dcm r = quat_to_dcm(random_unit(rng));
    EXPECT_LT((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-14);
  }
}

TEST(Skew, Examples) {
  EXPECT_TRUE(skew(Vec3::Zero()).isZero(0.0));
  EXPECT_EQ(skew(Vec3::UnitX()) * Vec3::UnitY(), Vec3::UnitZ());
}

TEST(Skew, AntisymmetricAndCross) {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = rng.gaussian3();
    const Vec3 u = rng.gaussian3();
    EXPECT_TRUE((skew(v) + skew(v).transpose()).isZero(0.0));
    EXPECT_LT((skew(v) * u - v.cross(u)).norm(), 1e-14);
  }
}

TEST(CorrectionQuat, ZeroIsIdentity) {
  EXPECT_EQ(correction_quat(Vec3::Zero()), Quaternion::identity());
}

TEST(CorrectionQuat, SmallAngleMatchesAxisAngle) {
  // Applying an error estimate dtheta rotates the estimate by -dtheta.
  const Vec3 dtheta(1e-3, 0, 0);
  const Quaternion c = correction_quat(dtheta);
  expect_quat_near(c, Quaternion::from_axis_angle(-dtheta), 1e-7);
  EXPECT_NEAR(2.0 * std::acos(c.w), 1e-3, 1e-9);
}

TEST(CorrectionQuat, InverseCorrectionRestores) {
  Rng rng(8);
  const Quaternion q = random_unit(rng);
  const Vec3 d(2e-3, -1e-3, 5e-4);
  const Quaternion back =
      quat_mult(correction_quat(-d), quat_mult(correction_quat(d), q)).normalized();
  expect_quat_near(back, q, 1e-9);
}

TEST(AttitudeError, InvertsCorrection) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const Quaternion q_hat = random_unit(rng);
    const Vec3 d = 0.01 * rng.gaussian3();
    const Quaternion q = quat_mult(correction_quat(d), q_hat);
    EXPECT_LT((attitude_error(q, q_hat) - d).norm(), 1e-14);
    EXPECT_LT((attitude_error(-q, q_hat) - d).norm(), 1e-14);
  }
}

TEST(QuatFromEuler, YawOnly) {
  const Dcm r = quat_to_dcm(quat_from_euler(M_PI / 2, 0, 0));
  EXPECT_LT((r * Vec3::UnitX() - Vec3::UnitY()).norm(), 1e-15);
}
