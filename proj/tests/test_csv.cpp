#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fidnav/csv.hpp"

using namespace fidnav;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fidnav_csv_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST(Csv, McSummaryReingestsExactly) {
  const fs::path dir = scratch_dir("mc");
  const McSummary s = run_monte_carlo(RunConfig::from_scenario(ScenarioConfig{}, 4), 3, 1);
  write_mc_summary_csv(dir / "mc.csv", s, 0.97);
  const auto rows = read_mc_summary_csv(dir / "mc.csv");
  ASSERT_EQ(rows.size(), static_cast<std::size_t>(kErrorStates));
  for (int i = 0; i < kErrorStates; ++i) {
    EXPECT_EQ(rows[i].state, error_state_names()[i]);
    EXPECT_EQ(rows[i].inside, s.inside[i]);
    EXPECT_EQ(rows[i].samples, s.samples);
    EXPECT_EQ(rows[i].containment, s.containment[i]);
    EXPECT_EQ(rows[i].containment,
              static_cast<double>(rows[i].inside) / static_cast<double>(rows[i].samples));
  }
}

TEST(Csv, HeadersCarryUnits) {
  const fs::path dir = scratch_dir("headers");
  RunConfig cfg = RunConfig::from_scenario(ScenarioConfig{}, 2);
  cfg.record_measurements = true;
  const RunLog log = run_single(cfg);
  write_errors_csv(dir / "errors.csv", log);
  write_filter_log_csv(dir / "filter.csv", log);
  write_trajectory_csv(dir / "traj.csv", log);
  EXPECT_NE(first_line(dir / "errors.csv").find("err_att_n_rad"), std::string::npos);
  EXPECT_NE(first_line(dir / "errors.csv").find("sigma3_bg_z_radps"), std::string::npos);
  EXPECT_NE(first_line(dir / "filter.csv").find("sigma_ba_x_mps2"), std::string::npos);
  EXPECT_EQ(first_line(dir / "traj.csv").substr(0, 14), "t_s,p_n_m,p_e_");
}

TEST(Csv, SweepRowsAndWriteFailure) {
  const fs::path dir = scratch_dir("sweep");
  SweepResult r;
  r.parameter = SweepParameter::LosRate;
  SweepPoint p;
  p.value = 5.0;
  p.message = "a, b";
  r.points = {p, p};
  write_sweep_csv(dir / "s.csv", r);
  const std::string text = slurp(dir / "s.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_EQ(text.find("a, b"), std::string::npos);
  EXPECT_THROW(write_sweep_csv(dir / "missing" / "s.csv", r), std::runtime_error);
}

TEST(Csv, ManifestIsDeterministic) {
  const fs::path dir = scratch_dir("manifest");
  const std::map<std::string, std::string> m{{"command", "run"}, {"seed", "7"}};
  write_manifest(dir / "a.yaml", m);
  write_manifest(dir / "b.yaml", m);
  EXPECT_EQ(slurp(dir / "a.yaml"), slurp(dir / "b.yaml"));
  EXPECT_NE(slurp(dir / "a.yaml").find("seed: 7"), std::string::npos);
}
