#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fidnav/ekf.hpp"
#include "fidnav/scenario.hpp"

namespace fidnav {

enum class NoiseMode {
  Full,            // sampled initial errors, bias walks, IMU and sensor noise
  CovarianceOnly,  // noiseless truth, perfect initial estimate, nominal P0/Q/R
};

struct RunConfig {
  ScenarioConfig scenario;
  std::uint64_t seed = 1;
  int log_decimation = 20;  // truth steps between log records
  NoiseMode noise = NoiseMode::Full;
  bool record_measurements = false;
  /// Multiplies the filter's measurement covariance only. Used to verify the
  /// harness detects a mistuned filter.
  double filter_r_scale = 1.0;

  static RunConfig from_scenario(const ScenarioConfig& scenario, std::uint64_t seed);
};

struct LogRecord {
  double t = 0.0;
  TruthState truth;
  NavState nav;
  ErrorState error;  // state_error(truth, nav)
  ErrorState sigma;  // sqrt(diag(P))
};

struct ResidualRecord {
  double t = 0.0;
  MeasKind kind = MeasKind::Gnss;
  int fiducial_id = -1;
  int dim = 3;
  Vec3 residual = Vec3::Zero();
  Vec3 sigma3 = Vec3::Zero();  // 3 sqrt(diag(H P H^T + G R G^T))
};

struct MeasurementRecord {
  double t = 0.0;
  MeasKind kind = MeasKind::Gnss;
  int fiducial_id = -1;
  int dim = 3;
  Vec3 z = Vec3::Zero();
};

struct NumericalFlag {
  double t = 0.0;
  std::string message;
};

struct RunLog {
  std::vector<LogRecord> records;
  std::vector<ResidualRecord> residuals;
  std::vector<MeasurementRecord> measurements;
  std::vector<NumericalFlag> flags;
  std::optional<double> gnss_cutoff_time;  // first truth step at or below the cutoff
  std::optional<double> first_los_time;
  int gnss_updates = 0;
  int los_updates = 0;
  double duration_s = 0.0;
};

/// Co-simulates truth, sensors and filter for one scenario realization.
RunLog run_single(const RunConfig& cfg);

/// RSS of the position 3-sigma envelope.
double position_sigma3_rss(const LogRecord& rec);

/// True when the position 3-sigma RSS strictly increases over every log
/// record between the GNSS cutoff and the first LOS update.
bool position_sigma_grows_until_first_fiducial(const RunLog& log);

// ============================================================================
// Residual diagnostics
// ============================================================================

inline constexpr int kResidualChannels = 5;
inline constexpr std::array<const char*, kResidualChannels> kResidualChannelNames = {
    "gnss_n", "gnss_e", "gnss_d", "los_x", "los_y"};

/// Normalized residual sequences, one sequence per run.
struct ResidualChannel {
  std::string name;
  std::vector<std::vector<double>> sequences;
};

std::array<ResidualChannel, kResidualChannels> residual_channels(std::span<const RunLog> logs);
std::array<ResidualChannel, kResidualChannels> residual_channels(const RunLog& log);

struct ChannelWhiteness {
  std::string name;
  std::size_t n = 0;
  bool sufficient = false;   // at least 30 samples
  double mean = 0.0;
  double std_dev = 0.0;      // predicted value is 1 for normalized residuals
  double mean_limit = 0.0;   // 3 / sqrt(N)
  bool mean_ok = false;
  double band = 0.0;         // 2 / sqrt(N)
  std::vector<double> autocorrelation;  // lags 1..max_lag
  double inside_fraction = 0.0;
  bool band_ok = false;      // >= 90% of lags inside the band

  bool pass() const { return sufficient && mean_ok && band_ok; }
};

struct WhitenessReport {
  std::vector<ChannelWhiteness> channels;
  bool pass() const;
};

/// Pooled mean and lag autocorrelation tests. Lag products never straddle
/// two runs.
WhitenessReport residual_diagnostics(std::span<const ResidualChannel> channels, int max_lag = 20);

// ============================================================================
// Monte Carlo
// ============================================================================

/// Per-run reduction kept by the ensemble instead of the full log.
struct RunStats {
  std::array<std::int64_t, kErrorStates> inside{};
  std::int64_t samples = 0;
  std::array<std::vector<double>, kResidualChannels> residuals;
  bool growth_ok = false;
  std::size_t numerical_flags = 0;
  std::vector<NumericalFlag> first_flags;
};

RunStats reduce_run(const RunLog& log);

struct McSummary {
  int runs = 0;
  std::array<std::int64_t, kErrorStates> inside{};
  std::int64_t samples = 0;
  std::array<double, kErrorStates> containment{};
  WhitenessReport whiteness;
  int growth_violations = 0;
  std::size_t numerical_flags = 0;
  std::vector<NumericalFlag> flag_examples;

  bool containment_ok(double threshold) const;
};

/// Names of the 18 error components in order, e.g. "pos_n".
const std::array<std::string, kErrorStates>& error_state_names();

/// Folds per-run statistics in index order, so results do not depend on
/// which worker ran which seed.
McSummary summarize(std::span<const RunStats> runs);

/// Runs n_runs realizations with seeds derive_seed(base.seed, i) across
/// `threads` workers (0 = hardware concurrency).
McSummary run_monte_carlo(const RunConfig& base, int n_runs, unsigned threads = 0);

/// Runs `count` independent jobs on a worker pool; job(i) must only touch
/// slot i of any shared output.
void parallel_for(int count, unsigned threads, const std::function<void(int)>& job);

}  // namespace fidnav
