#include <cmath>

#include <gtest/gtest.h>

#include "fidnav/random.hpp"
#include "fidnav/truth.hpp"
#include "fidnav/units.hpp"

using namespace fidnav;

namespace {

ImuSpec quiet_spec() {
  ImuSpec s;
  s.tau_a = 100.0;
  s.tau_g = 100.0;
  return s;
}

}  // namespace

TEST(Units, Conversions) {
  EXPECT_DOUBLE_EQ(units::vrw_to_psd(0.060), std::pow(0.060 / 60.0, 2));
  EXPECT_DOUBLE_EQ(units::g_to_mps2(1.0), 9.80665);
  EXPECT_NEAR(units::deg_per_hr_to_rad_per_s(3600.0), M_PI / 180.0, 1e-16);
  EXPECT_NEAR(units::arw_to_psd(60.0), std::pow(M_PI / 180.0, 2), 1e-18);
}

TEST(ImuSpec, PresetsAndValidation) {
  const ImuSpec t = ImuSpec::preset(ImuGrade::Tactical);
  EXPECT_DOUBLE_EQ(t.q_nu, 0.060);
  EXPECT_DOUBLE_EQ(t.sigma_ss_a, 0.001);
  EXPECT_DOUBLE_EQ(t.sigma_ss_g, 1.0);
  EXPECT_DOUBLE_EQ(t.q_omega, 0.070);
  EXPECT_NEAR(ImuSpec::preset(ImuGrade::Commercial).q_nu_si() /
                  ImuSpec::preset(ImuGrade::Navigation).q_nu_si(),
              1e4, 1e-8);
  ImuSpec bad = t;
  bad.tau_a = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_EQ(parse_imu_grade("navigation"), ImuGrade::Navigation);
  EXPECT_FALSE(parse_imu_grade("consumer"));
}

TEST(TruthDerivative, Hover) {
  TruthState x;
  x.v_n = Vec3(1.0, 2.0, 0.0);
  const Vec3 nu = -gravity_ned();
  const TruthDerivative d = truth_derivative(x, nu, Vec3::Zero(), quiet_spec());
  EXPECT_EQ(d.p_dot, x.v_n);
  EXPECT_TRUE(d.v_dot.isZero(1e-15));
  EXPECT_EQ(d.q_dot, Quaternion(0, 0, 0, 0));
}

TEST(TruthDerivative, FreeFall) {
  const TruthDerivative d = truth_derivative(TruthState{}, Vec3::Zero(), Vec3::Zero(), quiet_spec());
  EXPECT_EQ(d.v_dot, Vec3(0, 0, units::kGravity));
}

TEST(TruthDerivative, BiasDecay) {
  TruthState x;
  x.b_a = Vec3(0.1, -0.2, 0.3);
  const TruthDerivative d = truth_derivative(x, -gravity_ned(), Vec3::Zero(), quiet_spec());
  EXPECT_TRUE(d.b_a_dot.isApprox(-x.b_a / 100.0));
}

TEST(StepTruth, HoverStaysPut) {
  TruthState x;
  x.p_n = Vec3(5.0, -3.0, -20.0);
  const TruthState x0 = x;
  for (int i = 0; i < 2000; ++i) x = step_truth(x, -gravity_ned(), Vec3::Zero(), quiet_spec(), 0.005);
  EXPECT_LT((x.p_n - x0.p_n).norm(), 1e-12);
}

TEST(StepTruth, ConstantAccelerationClosedForm) {
  TruthState x;
  const Vec3 nu = Vec3(1.0, 0.0, 0.0) - gravity_ned();
  for (int i = 0; i < 2000; ++i) x = step_truth(x, nu, Vec3::Zero(), quiet_spec(), 0.005);
  EXPECT_NEAR(x.p_n.x(), 50.0, 1e-6);
  EXPECT_NEAR(x.v_n.x(), 10.0, 1e-9);
}

TEST(StepTruth, RejectsLargeStep) {
  EXPECT_THROW(step_truth(TruthState{}, Vec3::Zero(), Vec3::Zero(), quiet_spec(), 0.05),
               std::invalid_argument);
}

TEST(StepTruth, EcrvStationaryVariance) {
  // 20000 independent chains started from the stationary law, 50 steps each:
  // 1e6 transitions, and the end-state variance must still be sigma_ss^2.
  const ImuSpec spec = ImuSpec::preset(ImuGrade::Tactical);
  Rng rng(21);
  const int chains = 20000;
  double sum2 = 0.0;
  for (int c = 0; c < chains; ++c) {
    TruthState x;
    x.b_a = spec.sigma_ss_a_si() * rng.gaussian3();
    for (int i = 0; i < 50; ++i) x = step_truth(x, -gravity_ned(), Vec3::Zero(), spec, 0.02, &rng);
    sum2 += x.b_a.squaredNorm();
  }
  const double var = sum2 / (3.0 * chains);
  EXPECT_NEAR(var / std::pow(spec.sigma_ss_a_si(), 2), 1.0, 0.02);
}

TEST(ImuSample, NoiselessSamples) {
  TruthState x;
  const Vec3 nu(0.3, -0.1, -9.8);
  const Vec3 w(0.01, 0.02, 0.03);
  EXPECT_EQ(imu_sample(x, nu, w, quiet_spec(), 0.005, 0.0).nu_tilde, nu);
  x.b_a = Vec3(0.1, 0, 0);
  EXPECT_EQ(imu_sample(x, nu, w, quiet_spec(), 0.005, 0.0).nu_tilde, nu + Vec3(0.1, 0, 0));
}

TEST(ImuSample, WhiteNoiseStd) {
  const ImuSpec spec = ImuSpec::preset(ImuGrade::Tactical);
  const double dt = 0.005;
  Rng rng(3);
  double s2 = 0.0;
  const int n = 1000000;
  const Vec3 nu = -gravity_ned();
  for (int i = 0; i < n; ++i) {
    const ImuSample s = imu_sample(TruthState{}, nu, Vec3::Zero(), spec, dt, 0.0, &rng);
    s2 += std::pow(s.nu_tilde.y() - nu.y(), 2);
  }
  const double expected = std::sqrt(std::pow(0.060 / 60.0, 2) / dt);
  EXPECT_NEAR(std::sqrt(s2 / n) / expected, 1.0, 0.01);
}

TEST(Trajectory, LevelSegmentBeforeDescent) {
  TrajectoryPlan plan;
  plan.weave_count = 0;
  const Trajectory traj(plan);
  const ReferenceSample a = traj.sample(1.0);
  const ReferenceSample b = traj.sample(20.0);
  EXPECT_TRUE(a.a.isZero(1e-12));
  EXPECT_TRUE((a.v - b.v).isZero(1e-12));
  EXPECT_LT((quat_to_dcm(a.q_bn) - quat_to_dcm(b.q_bn)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Trajectory, NominalCutoffCrossing) {
  const Trajectory traj{TrajectoryPlan{}};
  const auto t = traj.crossing_time(40.0);
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, 48.5, 2.0);
  EXPECT_LT(traj.level_off_time(), TrajectoryPlan{}.duration_s);
  EXPECT_NEAR(traj.altitude(TrajectoryPlan{}.duration_s), 15.0, 1e-9);
}

TEST(Trajectory, VelocityMatchesDifferencedPosition) {
  const Trajectory traj{TrajectoryPlan{}};
  const double h = 1e-4;
  for (double t = 0.5; t < 104.5; t += 0.73) {
    const Vec3 dp = (traj.sample(t + h).p - traj.sample(t - h).p) / (2.0 * h);
    EXPECT_LT((dp - traj.sample(t).v).cwiseAbs().maxCoeff(), 1e-6) << "t=" << t;
    const Vec3 dv = (traj.sample(t + h).v - traj.sample(t - h).v) / (2.0 * h);
    EXPECT_LT((dv - traj.sample(t).a).cwiseAbs().maxCoeff(), 1e-5) << "t=" << t;
  }
}

TEST(Trajectory, RejectsExcessiveAcceleration) {
  TrajectoryPlan plan;
  plan.weave_amplitude_m = 2000.0;
  EXPECT_THROW(Trajectory{plan}, std::invalid_argument);
}

TEST(Trajectory, ReferenceInputReproducesReference) {
  const Trajectory traj{TrajectoryPlan{}};
  const double dt = 0.005;
  TruthState x;
  const ReferenceSample r0 = traj.sample(0.0);
  x.p_n = r0.p;
  x.v_n = r0.v;
  x.q_bn = r0.q_bn;
  for (int i = 0; i < 8000; ++i) {
    const KinematicInput u = reference_input(x, traj.sample((i + 0.5) * dt), dt);
    x = step_truth(x, u.nu_b, u.omega_b, ImuSpec{}, dt);
  }
  EXPECT_LT((x.p_n - traj.sample(40.0).p).norm(), 1e-3);
}

TEST(Fiducials, FourAlongThreeHundredMetres) {
  TrajectoryPlan plan;
  plan.corridor_start_m = 0.0;
  plan.ground_speed_mps = 15.0;
  plan.duration_s = 20.0;
  const FiducialField f = place_fiducials(plan, 100.0, 6.0);
  ASSERT_EQ(f.fiducials.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(f.fiducials[i].position_n.x(), 100.0 * i);
    EXPECT_DOUBLE_EQ(f.fiducials[i].position_n.y(), i % 2 == 0 ? 6.0 : -6.0);
    EXPECT_DOUBLE_EQ(f.fiducials[i].position_n.z(), 0.0);
  }
}

TEST(Fiducials, ZeroOffsetAndCount) {
  TrajectoryPlan plan;
  plan.corridor_start_m = 0.0;
  plan.ground_speed_mps = 10.0;
  plan.duration_s = 40.0;
  const FiducialField f = place_fiducials(plan, 10.0, 0.0);
  EXPECT_EQ(f.fiducials.size(), 41u);
  for (const auto& fid : f.fiducials) EXPECT_EQ(fid.position_n.y(), 0.0);
  ASSERT_NE(f.find(40), nullptr);
  EXPECT_EQ(f.find(41), nullptr);
}
