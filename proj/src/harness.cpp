#include "fidnav/harness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace fidnav {

namespace {

constexpr std::size_t kMaxFlagExamples = 20;

void flag(RunLog& log, double t, std::string message) {
  log.flags.push_back({t, std::move(message)});
}

LogRecord make_record(double t, const TruthState& x, const NavState& x_hat, const Covariance& P) {
  LogRecord rec;
  rec.t = t;
  rec.truth = x;
  rec.nav = x_hat;
  rec.error = state_error(x, x_hat);
  rec.sigma = P.diagonal().cwiseMax(0.0).cwiseSqrt();
  return rec;
}

ResidualRecord make_residual(double t, const MeasModel& model, const UpdateResult& upd) {
  ResidualRecord r;
  r.t = t;
  r.kind = model.kind;
  r.fiducial_id = model.fiducial_id;
  r.dim = static_cast<int>(upd.residual.size());
  for (int i = 0; i < r.dim; ++i) {
    r.residual[i] = upd.residual[i];
    r.sigma3[i] = 3.0 * std::sqrt(upd.residual_cov(i, i));
  }
  return r;
}

}  // namespace

RunConfig RunConfig::from_scenario(const ScenarioConfig& scenario, std::uint64_t seed) {
  RunConfig cfg;
  cfg.scenario = scenario;
  cfg.seed = seed;
  cfg.log_decimation = scenario.log_decimation();
  return cfg;
}

RunLog run_single(const RunConfig& cfg) {
  const ScenarioConfig& sc = cfg.scenario;
  sc.validate();
  if (cfg.log_decimation < 1) throw std::invalid_argument("log_decimation must be >= 1");
  if (!(cfg.filter_r_scale > 0.0)) throw std::invalid_argument("filter_r_scale must be positive");

  const Trajectory trajectory(sc.trajectory);
  const FiducialField field =
      place_fiducials(sc.trajectory, sc.fiducial_spacing_m, sc.cross_track_offset_m);
  const bool noisy = cfg.noise == NoiseMode::Full;
  Rng rng(cfg.seed);
  Rng* noise = noisy ? &rng : nullptr;

  const double dt = sc.dt();
  const int steps = sc.truth_steps();
  const int gnss_every = sc.steps_per_sample(sc.gnss.rate_hz);
  const int camera_every = sc.steps_per_sample(sc.camera.rate_hz);

  CameraModel filter_camera = sc.camera;
  filter_camera.sigma_los *= std::sqrt(cfg.filter_r_scale);
  GnssModel filter_gnss = sc.gnss;
  filter_gnss.sigma_xyz *= std::sqrt(cfg.filter_r_scale);
  const ProcessNoise q = process_noise(sc.imu);

  // Truth starts on the reference; the estimate is offset by a draw from P0.
  const ReferenceSample ref0 = trajectory.sample(0.0);
  TruthState x;
  x.p_n = ref0.p;
  x.v_n = ref0.v;
  x.q_bn = ref0.q_bn;
  x.q_cb = sc.camera.q_cb;
  Covariance P = sc.initial.covariance(sc.imu);
  ErrorState dx0 = ErrorState::Zero();
  if (noisy) {
    for (int i = 0; i < kErrorStates; ++i) dx0[i] = std::sqrt(P(i, i)) * rng.gaussian();
  }
  x.b_a = dx0.segment<3>(err::kAccBias);
  x.b_g = dx0.segment<3>(err::kGyroBias);
  x.q_cb = quat_mult(correction_quat(dx0.segment<3>(err::kCamMount)), x.q_cb).normalized();
  NavState x_hat = noisy ? remove_error(x, dx0) : to_nav_state(x);

  RunLog log;
  log.duration_s = sc.trajectory.duration_s;
  log.records.reserve(static_cast<std::size_t>(steps / cfg.log_decimation + 2));
  log.records.push_back(make_record(0.0, x, x_hat, P));

  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const double t_next = (k + 1) * dt;

    const KinematicInput input = reference_input(x, trajectory.sample(t + 0.5 * dt), dt);
    const ImuSample imu = imu_sample(x, input.nu_b, input.omega_b, sc.imu, dt, t, noise);
    x = step_truth(x, input.nu_b, input.omega_b, sc.imu, dt, noise);

    const PropagateResult prop = propagate(x_hat, P, imu, dt, sc.imu, q);
    x_hat = prop.x_hat;
    P = prop.P;
    if (!prop.healthy) flag(log, t_next, "covariance propagation produced invalid diagonal");

    if (!log.gnss_cutoff_time && !sc.gnss.available(x.p_n)) log.gnss_cutoff_time = t_next;

    if ((k + 1) % gnss_every == 0) {
      if (const auto meas = gnss_measure(x, sc.gnss, t_next, noise)) {
        const MeasModel model = predict_gnss(x_hat, filter_gnss);
        const UpdateResult upd = update(x_hat, P, meas->z, model);
        if (cfg.record_measurements) {
          log.measurements.push_back({t_next, MeasKind::Gnss, -1, 3, meas->z});
        }
        if (upd.applied) {
          x_hat = upd.x_hat;
          P = upd.P;
          ++log.gnss_updates;
          log.residuals.push_back(make_residual(t_next, model, upd));
        } else {
          flag(log, t_next, "gnss update skipped: " + upd.reason);
        }
      }
    }

    if ((k + 1) % camera_every == 0) {
      // Each visible fiducial is a separate update at the same timestamp.
      for (const int id : visible_fiducials(x, field, sc.camera)) {
        const Fiducial& fid = *field.find(id);
        const LosMeas meas = los_measure(x, fid, sc.camera, t_next, noise);
        if (cfg.record_measurements) {
          log.measurements.push_back(
              {t_next, MeasKind::Los, id, 2, Vec3(meas.z.x(), meas.z.y(), 0.0)});
        }
        const auto model = predict_los(x_hat, fid, filter_camera);
        if (!model) {
          flag(log, t_next, "los update skipped: predicted fiducial " + std::to_string(id) +
                                " behind camera");
          continue;
        }
        const UpdateResult upd = update(x_hat, P, meas.z, *model);
        if (!upd.applied) {
          flag(log, t_next, "los update skipped: " + upd.reason);
          continue;
        }
        x_hat = upd.x_hat;
        P = upd.P;
        ++log.los_updates;
        if (!log.first_los_time) log.first_los_time = t_next;
        log.residuals.push_back(make_residual(t_next, *model, upd));
      }
    }

    if ((k + 1) % cfg.log_decimation == 0 || k + 1 == steps) {
      const CovarianceHealth health = covariance_health(P);
      if (!health.ok()) {
        flag(log, t_next,
             "covariance not symmetric PSD (min eigenvalue " +
                 std::to_string(health.min_eigenvalue) + ")");
      }
      log.records.push_back(make_record(t_next, x, x_hat, P));
    }
  }
  return log;
}

double position_sigma3_rss(const LogRecord& rec) {
  return 3.0 * rec.sigma.segment<3>(err::kPos).norm();
}

bool position_sigma_grows_until_first_fiducial(const RunLog& log) {
  if (!log.gnss_cutoff_time || !log.first_los_time) return false;
  const double start = *log.gnss_cutoff_time;
  const double stop = *log.first_los_time;
  double previous = -1.0;
  int checked = 0;
  for (const auto& rec : log.records) {
    if (rec.t < start - 1e-9 || rec.t >= stop - 1e-9) continue;
    const double value = position_sigma3_rss(rec);
    if (checked > 0 && !(value > previous)) return false;
    previous = value;
    ++checked;
  }
  return checked >= 2;
}

std::array<ResidualChannel, kResidualChannels> residual_channels(std::span<const RunLog> logs) {
  std::array<ResidualChannel, kResidualChannels> channels;
  for (int c = 0; c < kResidualChannels; ++c) channels[c].name = kResidualChannelNames[c];
  for (const auto& log : logs) {
    for (auto& ch : channels) ch.sequences.emplace_back();
    for (const auto& r : log.residuals) {
      const int offset = r.kind == MeasKind::Gnss ? 0 : 3;
      for (int i = 0; i < r.dim; ++i) {
        channels[offset + i].sequences.back().push_back(r.residual[i] / (r.sigma3[i] / 3.0));
      }
    }
  }
  return channels;
}

std::array<ResidualChannel, kResidualChannels> residual_channels(const RunLog& log) {
  return residual_channels(std::span<const RunLog>(&log, 1));
}

bool WhitenessReport::pass() const {
  for (const auto& ch : channels) {
    if (!ch.pass()) return false;
  }
  return !channels.empty();
}

WhitenessReport residual_diagnostics(std::span<const ResidualChannel> channels, int max_lag) {
  WhitenessReport report;
  for (const auto& ch : channels) {
    ChannelWhiteness w;
    w.name = ch.name;
    double sum = 0.0;
    for (const auto& seq : ch.sequences) {
      w.n += seq.size();
      for (const double v : seq) sum += v;
    }
    w.sufficient = w.n >= 30;
    if (w.n == 0) {
      report.channels.push_back(std::move(w));
      continue;
    }
    const double n = static_cast<double>(w.n);
    w.mean = sum / n;
    double var = 0.0;
    for (const auto& seq : ch.sequences) {
      for (const double v : seq) var += (v - w.mean) * (v - w.mean);
    }
    w.std_dev = std::sqrt(var / n);
    w.mean_limit = 3.0 / std::sqrt(n);
    w.mean_ok = std::abs(w.mean) <= w.mean_limit;
    w.band = 2.0 / std::sqrt(n);

    int inside = 0;
    for (int lag = 1; lag <= max_lag; ++lag) {
      double acc = 0.0;
      for (const auto& seq : ch.sequences) {
        for (std::size_t i = 0; i + lag < seq.size(); ++i) {
          acc += (seq[i] - w.mean) * (seq[i + lag] - w.mean);
        }
      }
      const double rho = var > 0.0 ? acc / var : 0.0;
      w.autocorrelation.push_back(rho);
      if (std::abs(rho) <= w.band) ++inside;
    }
    w.inside_fraction = max_lag > 0 ? static_cast<double>(inside) / max_lag : 1.0;
    w.band_ok = w.inside_fraction >= 0.9;
    report.channels.push_back(std::move(w));
  }
  return report;
}

RunStats reduce_run(const RunLog& log) {
  RunStats s;
  for (const auto& rec : log.records) {
    ++s.samples;
    for (int i = 0; i < kErrorStates; ++i) {
      if (std::abs(rec.error[i]) <= 3.0 * rec.sigma[i]) ++s.inside[i];
    }
  }
  auto channels = residual_channels(log);
  for (int c = 0; c < kResidualChannels; ++c) {
    s.residuals[c] = std::move(channels[c].sequences.front());
  }
  s.growth_ok = position_sigma_grows_until_first_fiducial(log);
  s.numerical_flags = log.flags.size();
  for (std::size_t i = 0; i < log.flags.size() && i < kMaxFlagExamples; ++i) {
    s.first_flags.push_back(log.flags[i]);
  }
  return s;
}

const std::array<std::string, kErrorStates>& error_state_names() {
  static const std::array<std::string, kErrorStates> names = {
      "pos_n",   "pos_e",   "pos_d",   "vel_n",   "vel_e",   "vel_d",
      "att_n",   "att_e",   "att_d",   "ba_x",    "ba_y",    "ba_z",
      "bg_x",    "bg_y",    "bg_z",    "cam_x",   "cam_y",   "cam_z"};
  return names;
}

bool McSummary::containment_ok(double threshold) const {
  for (const double c : containment) {
    if (!(c >= threshold)) return false;
  }
  return runs > 0;
}

McSummary summarize(std::span<const RunStats> runs) {
  McSummary m;
  m.runs = static_cast<int>(runs.size());
  std::vector<ResidualChannel> channels(kResidualChannels);
  for (int c = 0; c < kResidualChannels; ++c) channels[c].name = kResidualChannelNames[c];
  for (const auto& r : runs) {
    m.samples += r.samples;
    for (int i = 0; i < kErrorStates; ++i) m.inside[i] += r.inside[i];
    for (int c = 0; c < kResidualChannels; ++c) channels[c].sequences.push_back(r.residuals[c]);
    if (!r.growth_ok) ++m.growth_violations;
    m.numerical_flags += r.numerical_flags;
    for (const auto& f : r.first_flags) {
      if (m.flag_examples.size() < kMaxFlagExamples) m.flag_examples.push_back(f);
    }
  }
  for (int i = 0; i < kErrorStates; ++i) {
    m.containment[i] =
        m.samples > 0 ? static_cast<double>(m.inside[i]) / static_cast<double>(m.samples) : 0.0;
  }
  m.whiteness = residual_diagnostics(channels);
  return m;
}

void parallel_for(int count, unsigned threads, const std::function<void(int)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(count, 1)));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

McSummary run_monte_carlo(const RunConfig& base, int n_runs, unsigned threads) {
  if (n_runs < 1) throw std::invalid_argument("run_monte_carlo: n_runs must be >= 1");
  std::vector<RunStats> stats(static_cast<std::size_t>(n_runs));
  parallel_for(n_runs, threads, [&](int i) {
    RunConfig cfg = base;
    cfg.seed = derive_seed(base.seed, static_cast<std::uint64_t>(i));
    stats[static_cast<std::size_t>(i)] = reduce_run(run_single(cfg));
  });
  return summarize(stats);
}

}  // namespace fidnav
