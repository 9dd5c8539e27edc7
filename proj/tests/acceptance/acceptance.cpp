// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Usage: fidnav_acceptance <path-to-fidnav-cli> <scratch-dir>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fidnav/ekf.hpp"
#include "fidnav/harness.hpp"
#include "fidnav/jacobian_audit.hpp"
#include "fidnav/random.hpp"
#include "fidnav/sensitivity.hpp"

namespace fs = std::filesystem;
using namespace fidnav;

namespace {

// Tolerances.
constexpr int kMcRuns = 200;
constexpr std::uint64_t kMcSeed = 1;
constexpr double kContainment = 0.97;
constexpr int kJacobianSamples = 100;
constexpr double kJacobianTol = 1e-5;
constexpr int kJosephInstances = 100;
constexpr double kJosephTol = 1e-10;
constexpr double kEcrvTol = 1e-6;
constexpr double kDoubleIntegratorTol = 0.01;
constexpr double kGapAt10Max = 0.3;
constexpr double kGapAt400Min = 2.0;
constexpr double kRate20Lo = 0.13;
constexpr double kRate20Hi = 0.52;
constexpr double kRateRatioMin = 2.0;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  if (!pass) ++failures;
  fmt::print("{} criterion {}: {} [{}]\n", pass ? "PASS" : "FAIL", id, what, detail);
  std::fflush(stdout);
}

Eigen::MatrixXd random_spd(Rng& rng, int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = rng.gaussian();
  }
  return a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

void consistency(McSummary& summary) {
  RunConfig base = RunConfig::from_scenario(ScenarioConfig{}, kMcSeed);
  summary = run_monte_carlo(base, kMcRuns);
  double worst = 1.0;
  std::string worst_name;
  for (int i = 0; i < kErrorStates; ++i) {
    if (summary.containment[i] < worst) {
      worst = summary.containment[i];
      worst_name = error_state_names()[i];
    }
  }
  report(1, summary.containment_ok(kContainment) && summary.numerical_flags == 0,
         fmt::format("{} runs, every error component inside 3-sigma >= {}", kMcRuns, kContainment),
         fmt::format("min containment {:.4f} ({}), numerical flags {}", worst, worst_name,
                     summary.numerical_flags));
}

void residuals(const McSummary& summary) {
  std::string detail;
  for (const auto& c : summary.whiteness.channels) {
    detail += fmt::format("{} n={} |mean|={:.4f}<={:.4f} lags-in-band={:.2f}; ", c.name, c.n,
                          std::abs(c.mean), c.mean_limit, c.inside_fraction);
  }
  report(2, summary.whiteness.pass() && summary.whiteness.channels.size() == kResidualChannels,
         "pooled normalized residuals zero-mean (3/sqrt(N)) and white (>= 90% of lags 1-20 "
         "within 2/sqrt(N))",
         detail);
}

void jacobians() {
  const JacobianAudit a = audit_jacobians(kJacobianSamples, 2024, ImuSpec::preset(ImuGrade::Tactical),
                                          CameraModel{}, kJacobianTol);
  report(3, a.pass() && a.samples.size() == kJacobianSamples,
         fmt::format("F and H_LOS match central differences at {} random states, rel err <= {:.0e}",
                     kJacobianSamples, kJacobianTol),
         fmt::format("max F {:.2e}, max H {:.2e}", a.max_f_rel_error, a.max_h_rel_error));
}

void joseph() {
  Rng rng(77);
  double worst = 0.0;
  for (int i = 0; i < kJosephInstances; ++i) {
    const Covariance P = random_spd(rng, kErrorStates);
    const int m = 1 + i % 3;
    MeasJacobian H(m, kErrorStates);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < kErrorStates; ++c) H(r, c) = rng.gaussian();
    }
    const MeasMatrix R = random_spd(rng, m);
    const GainMatrix K = kalman_gain(P, H, R);
    const Covariance short_form = (Covariance::Identity() - K * H) * P;
    const double rel = (joseph_update(P, K, H, R) - short_form).cwiseAbs().maxCoeff() /
                       short_form.cwiseAbs().maxCoeff();
    worst = std::max(worst, rel);
  }
  Covariance P = Covariance::Identity();
  MeasJacobian H = MeasJacobian::Zero(1, kErrorStates);
  H(0, 0) = 1.0;
  const MeasMatrix R = MeasMatrix::Identity(1, 1);
  const GainMatrix K = kalman_gain(P, H, R);
  const double k = K(0, 0);
  const double p_plus = joseph_update(P, K, H, R)(0, 0);
  report(4, worst <= kJosephTol && k == 0.5 && p_plus == 0.5,
         fmt::format("Joseph form equals (I-KH)P on {} random SPD cases within {:.0e}; scalar "
                     "K=0.5, P+=0.5",
                     kJosephInstances, kJosephTol),
         fmt::format("max rel {:.2e}, scalar K={}, P+={}", worst, k, p_plus));
}

void riccati() {
  ImuSample hover;
  hover.nu_tilde = -gravity_ned();
  const double dt = 0.005;

  ImuSpec ecrv;
  ecrv.sigma_ss_a = 0.001;
  const double s2 = std::pow(ecrv.sigma_ss_a_si(), 2);
  Covariance p = Covariance::Zero();
  p.block<3, 3>(err::kAccBias, err::kAccBias) = s2 * Mat3::Identity();
  double ecrv_dev = 0.0;
  for (int i = 0; i < 20000; ++i) {
    p = propagate(NavState{}, p, hover, dt, ecrv, process_noise(ecrv)).P;
    for (int k = 0; k < 3; ++k) {
      ecrv_dev = std::max(ecrv_dev, std::abs(p(err::kAccBias + k, err::kAccBias + k) / s2 - 1.0));
    }
  }

  ImuSpec walk;
  walk.q_nu = 0.6;
  Covariance q = Covariance::Zero();
  for (int i = 0; i < 2000; ++i) q = propagate(NavState{}, q, hover, dt, walk, process_noise(walk)).P;
  const double expected = walk.q_nu_si() * 1000.0 / 3.0;
  const double di_err = std::abs(q(0, 0) / expected - 1.0);
  report(5, ecrv_dev <= kEcrvTol && di_err <= kDoubleIntegratorTol,
         fmt::format("ECRV variance stationary over 100 s within {:.0e}; position variance q t^3/3 "
                     "at 10 s within {:.0f}%",
                     kEcrvTol, 100 * kDoubleIntegratorTol),
         fmt::format("ECRV max rel dev {:.2e}, double integrator rel err {:.2e}", ecrv_dev, di_err));
}

void trends(const McSummary& summary) {
  const ScenarioConfig base;
  SweepSpec spacing = SweepSpec::defaults(SweepParameter::FiducialSpacing);
  spacing.grades = {ImuGrade::Commercial, ImuGrade::Tactical, ImuGrade::Navigation};
  const SweepResult sp = run_sweep(spacing, base);
  const auto violations = grade_ordering_violations(sp);
  bool all_ok = true;
  for (const auto& p : sp.points) all_ok = all_ok && p.ok;
  const double gap10 =
      sp.find(10, ImuGrade::Commercial)->metric.rss_m - sp.find(10, ImuGrade::Navigation)->metric.rss_m;
  const double gap400 = sp.find(400, ImuGrade::Commercial)->metric.rss_m -
                        sp.find(400, ImuGrade::Navigation)->metric.rss_m;

  SweepSpec rate;
  rate.parameter = SweepParameter::LosRate;
  rate.values = {1.0, 20.0};
  const SweepResult rr = run_sweep(rate, base);
  const double m1 = rr.find(1.0, base.imu_grade)->metric.rss_m;
  const double m20 = rr.find(20.0, base.imu_grade)->metric.rss_m;

  const bool ordering = violations.empty() && all_ok && sp.points.size() == 120;
  const bool gaps = gap10 <= kGapAt10Max && gap400 >= kGapAt400Min;
  const bool rate_ok = m20 >= kRate20Lo && m20 <= kRate20Hi && m1 >= kRateRatioMin * m20;
  const bool growth = summary.growth_violations == 0 && summary.runs == kMcRuns;
  report(6, ordering && gaps && rate_ok && growth,
         "grade ordering at every spacing; commercial-navigation gap <= 0.3 m at 10 m and >= 2 m "
         "at 400 m; 20 Hz metric in [0.13, 0.52] m and 1 Hz >= 2x; position 3-sigma grows from "
         "GNSS loss to first fiducial in every run",
         fmt::format("ordering violations {}, gap10 {:.3f} m, gap400 {:.3f} m, metric 20 Hz {:.3f} "
                     "m, 1 Hz {:.3f} m, growth violations {}/{}",
                     violations.size(), gap10, gap400, m20, m1, summary.growth_violations,
                     summary.runs));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a)) files.push_back(e.path().filename());
  std::size_t nb = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++nb;
  if (files.empty() || files.size() != nb) {
    why = fmt::format("{} vs {} files", files.size(), nb);
    return false;
  }
  for (const auto& f : files) {
    if (slurp(a / f) != slurp(b / f)) {
      why = f.string() + " differs";
      return false;
    }
  }
  return true;
}

void determinism(const std::string& cli, const fs::path& scratch) {
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"run", "run --seed 7"},
      {"validate", "validate --runs 8 --seed 1"},
      {"sweep", "sweep --param rate --grades all --seed 3"},
      {"jacobians", "jacobians --samples 20 --seed 5"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, args] : commands) {
    fs::path dirs[2];
    for (int k = 0; k < 2; ++k) {
      dirs[k] = scratch / fmt::format("{}_{}", name, k);
      fs::remove_all(dirs[k]);
      const std::string cmd =
          fmt::format("\"{}\" {} --out \"{}\" > /dev/null", cli, args, dirs[k].string());
      const int rc = std::system(cmd.c_str());
      if (rc == -1 || !fs::exists(dirs[k])) {
        ok = false;
        detail += name + ": did not run; ";
      }
    }
    std::string why;
    if (fs::exists(dirs[0]) && fs::exists(dirs[1]) && same_tree(dirs[0], dirs[1], why)) {
      detail += name + ": identical; ";
    } else {
      ok = false;
      detail += name + ": " + why + "; ";
    }
  }
  report(7, ok, "every CLI command repeated with the same seed writes bit-identical files",
         detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <fidnav-cli> <scratch-dir>\n", argv[0]);
    return 2;
  }
  const fs::path scratch(argv[2]);
  fs::create_directories(scratch);

  McSummary summary;
  consistency(summary);
  residuals(summary);
  jacobians();
  joseph();
  riccati();
  trends(summary);
  determinism(argv[1], scratch);

  fmt::print("{} of 7 criteria passed\n", 7 - failures);
  return failures == 0 ? 0 : 1;
}
