#include "fidnav/csv.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace fidnav {

namespace {

class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path) : path_(path), out_(path) {
    if (!out_) throw std::runtime_error(fmt::format("{}: cannot open for writing", path.string()));
  }
  ~CsvFile() noexcept(false) {
    out_.flush();
    if (!out_ && std::uncaught_exceptions() == 0) {
      throw std::runtime_error(fmt::format("{}: write failed", path_.string()));
    }
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string num(double v) { return fmt::format("{}", v); }

void append(std::vector<std::string>& row, const Vec3& v) {
  for (int i = 0; i < 3; ++i) row.push_back(num(v(i)));
}

void append(std::vector<std::string>& row, const Quaternion& q) {
  for (const double c : {q.w, q.x, q.y, q.z}) row.push_back(num(c));
}

void append_names(std::vector<std::string>& row, std::string_view prefix,
                  std::initializer_list<std::string_view> names, std::string_view unit) {
  for (const auto n : names) row.push_back(fmt::format("{}{}_{}", prefix, n, unit));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

const std::string& error_state_unit(int i) {
  static const std::array<std::string, 6> units = {"m", "mps", "rad", "mps2", "radps", "rad"};
  return units.at(static_cast<std::size_t>(i / 3));
}

void write_trajectory_csv(const std::filesystem::path& path, const RunLog& log) {
  CsvFile f(path);
  std::vector<std::string> h{"t_s"};
  append_names(h, "p_", {"n", "e", "d"}, "m");
  append_names(h, "v_", {"n", "e", "d"}, "mps");
  append_names(h, "q_bn_", {"w", "x", "y", "z"}, "1");
  append_names(h, "b_a_", {"x", "y", "z"}, "mps2");
  append_names(h, "b_g_", {"x", "y", "z"}, "radps");
  f.row(h);
  for (const auto& r : log.records) {
    std::vector<std::string> row{num(r.t)};
    append(row, r.truth.p_n);
    append(row, r.truth.v_n);
    append(row, r.truth.q_bn);
    append(row, r.truth.b_a);
    append(row, r.truth.b_g);
    f.row(row);
  }
}

void write_fiducials_csv(const std::filesystem::path& path, const FiducialField& field) {
  CsvFile f(path);
  f.row({"id", "n_m", "e_m", "d_m"});
  for (const auto& fid : field.fiducials) {
    std::vector<std::string> row{std::to_string(fid.id)};
    append(row, fid.position_n);
    f.row(row);
  }
}

void write_measurements_csv(const std::filesystem::path& path, const RunLog& log) {
  CsvFile f(path);
  // GNSS rows hold NED position in m; LOS rows hold image-plane tangents in
  // z1, z2 and leave z3 empty.
  f.row({"t_s", "kind", "fiducial_id", "z1_m_or_tan", "z2_m_or_tan", "z3_m"});
  for (const auto& m : log.measurements) {
    f.row({num(m.t), std::string(to_string(m.kind)), std::to_string(m.fiducial_id), num(m.z(0)),
           num(m.z(1)), m.dim == 3 ? num(m.z(2)) : std::string()});
  }
}

void write_filter_log_csv(const std::filesystem::path& path, const RunLog& log) {
  CsvFile f(path);
  std::vector<std::string> h{"t_s"};
  append_names(h, "p_hat_", {"n", "e", "d"}, "m");
  append_names(h, "v_hat_", {"n", "e", "d"}, "mps");
  append_names(h, "q_bn_hat_", {"w", "x", "y", "z"}, "1");
  append_names(h, "b_a_hat_", {"x", "y", "z"}, "mps2");
  append_names(h, "b_g_hat_", {"x", "y", "z"}, "radps");
  append_names(h, "q_cb_hat_", {"w", "x", "y", "z"}, "1");
  for (int i = 0; i < kErrorStates; ++i) {
    h.push_back(fmt::format("sigma_{}_{}", error_state_names()[i], error_state_unit(i)));
  }
  f.row(h);
  for (const auto& r : log.records) {
    std::vector<std::string> row{num(r.t)};
    append(row, r.nav.p_hat);
    append(row, r.nav.v_hat);
    append(row, r.nav.q_bn_hat);
    append(row, r.nav.b_a_hat);
    append(row, r.nav.b_g_hat);
    append(row, r.nav.q_cb_hat);
    for (int i = 0; i < kErrorStates; ++i) row.push_back(num(r.sigma(i)));
    f.row(row);
  }
}

void write_errors_csv(const std::filesystem::path& path, const RunLog& log) {
  CsvFile f(path);
  std::vector<std::string> h{"t_s"};
  for (int i = 0; i < kErrorStates; ++i) {
    h.push_back(fmt::format("err_{}_{}", error_state_names()[i], error_state_unit(i)));
  }
  for (int i = 0; i < kErrorStates; ++i) {
    h.push_back(fmt::format("sigma3_{}_{}", error_state_names()[i], error_state_unit(i)));
  }
  f.row(h);
  for (const auto& r : log.records) {
    std::vector<std::string> row{num(r.t)};
    for (int i = 0; i < kErrorStates; ++i) row.push_back(num(r.error(i)));
    for (int i = 0; i < kErrorStates; ++i) row.push_back(num(3.0 * r.sigma(i)));
    f.row(row);
  }
}

void write_residuals_csv(const std::filesystem::path& path, const RunLog& log) {
  CsvFile f(path);
  f.row({"t_s", "kind", "fiducial_id", "r1_m_or_tan", "r2_m_or_tan", "r3_m", "sigma3_1_m_or_tan",
         "sigma3_2_m_or_tan", "sigma3_3_m"});
  for (const auto& r : log.residuals) {
    const bool three = r.dim == 3;
    f.row({num(r.t), std::string(to_string(r.kind)), std::to_string(r.fiducial_id),
           num(r.residual(0)), num(r.residual(1)), three ? num(r.residual(2)) : std::string(),
           num(r.sigma3(0)), num(r.sigma3(1)), three ? num(r.sigma3(2)) : std::string()});
  }
}

void write_mc_summary_csv(const std::filesystem::path& path, const McSummary& s,
                          double threshold) {
  CsvFile f(path);
  f.row({"state", "unit", "inside_count", "sample_count", "containment_fraction",
         "threshold_fraction", "pass"});
  for (int i = 0; i < kErrorStates; ++i) {
    const bool pass = s.containment[i] >= threshold;
    f.row({error_state_names()[i], error_state_unit(i), std::to_string(s.inside[i]),
           std::to_string(s.samples), num(s.containment[i]), num(threshold),
           pass ? "1" : "0"});
  }
}

std::vector<McSummaryRow> read_mc_summary_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("{}: cannot open", path.string()));
  std::string line;
  std::getline(in, line);
  std::vector<McSummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 7) {
      throw std::runtime_error(fmt::format("{}: malformed row '{}'", path.string(), line));
    }
    McSummaryRow r;
    r.state = fields[0];
    r.inside = std::stoll(fields[2]);
    r.samples = std::stoll(fields[3]);
    r.containment = std::stod(fields[4]);
    r.pass = fields[6] == "1";
    rows.push_back(r);
  }
  return rows;
}

void write_whiteness_csv(const std::filesystem::path& path, const WhitenessReport& report) {
  CsvFile f(path);
  std::vector<std::string> h{"channel", "n", "mean_sigma", "mean_limit_sigma", "std_sigma",
                             "band", "inside_fraction", "pass"};
  std::size_t lags = 0;
  for (const auto& c : report.channels) lags = std::max(lags, c.autocorrelation.size());
  for (std::size_t k = 1; k <= lags; ++k) h.push_back(fmt::format("acf_lag{}", k));
  f.row(h);
  for (const auto& c : report.channels) {
    std::vector<std::string> row{c.name,           std::to_string(c.n), num(c.mean),
                                 num(c.mean_limit), num(c.std_dev),     num(c.band),
                                 num(c.inside_fraction), c.pass() ? "1" : "0"};
    for (std::size_t k = 0; k < lags; ++k) {
      row.push_back(k < c.autocorrelation.size() ? num(c.autocorrelation[k]) : std::string());
    }
    f.row(row);
  }
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
  CsvFile f(path);
  f.row({std::string(to_string(result.parameter)), "grade", "metric_rss_3sigma_m",
         "metric_n_3sigma_m", "metric_e_3sigma_m", "metric_d_3sigma_m", "los_updates",
         "fiducials_in_window", "ok", "message"});
  for (const auto& p : result.points) {
    std::vector<std::string> row{num(p.value), std::string(to_string(p.grade)),
                                 num(p.metric.rss_m)};
    append(row, p.metric.axis_m);
    row.push_back(std::to_string(p.los_updates));
    row.push_back(std::to_string(p.fiducials_seen));
    row.push_back(p.ok ? "1" : "0");
    std::string msg = p.message;
    for (char& ch : msg) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    row.push_back(msg);
    f.row(row);
  }
}

void write_grade_gaps_csv(const std::filesystem::path& path, const SweepResult& result) {
  CsvFile f(path);
  f.row({std::string(to_string(result.parameter)), "commercial_minus_tactical_m",
         "tactical_minus_navigation_m", "commercial_minus_navigation_m"});
  auto cell = [](double x) { return std::isnan(x) ? std::string() : num(x); };
  for (const auto& g : grade_gaps(result)) {
    f.row({num(g.value), cell(g.commercial_tactical_m), cell(g.tactical_navigation_m),
           cell(g.commercial_navigation_m)});
  }
}

void write_jacobians_csv(const std::filesystem::path& path, const JacobianAudit& audit) {
  CsvFile f(path);
  f.row({"sample", "f_rel_error", "h_los_rel_error", "tolerance"});
  for (const auto& s : audit.samples) {
    f.row({std::to_string(s.index), num(s.f_rel_error), num(s.h_rel_error), num(audit.tolerance)});
  }
}

void write_manifest(const std::filesystem::path& path,
                    const std::map<std::string, std::string>& entries) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  for (const auto& [k, v] : entries) e << YAML::Key << k << YAML::Value << v;
  e << YAML::EndMap;
  std::ofstream out(path);
  out << e.c_str() << '\n';
  if (!out) throw std::runtime_error(fmt::format("{}: write failed", path.string()));
}

}  // namespace fidnav
