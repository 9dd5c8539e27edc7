#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fidnav/harness.hpp"
#include "fidnav/jacobian_audit.hpp"
#include "fidnav/sensitivity.hpp"

namespace fidnav {

// Every writer emits a header row whose column names carry units, and
// formats doubles with the shortest representation that reads back exactly.
// All writers throw std::runtime_error when the file cannot be written.

/// Unit suffix of error component i: m, mps, rad, mps2, radps.
const std::string& error_state_unit(int i);

void write_trajectory_csv(const std::filesystem::path& path, const RunLog& log);
void write_fiducials_csv(const std::filesystem::path& path, const FiducialField& field);
void write_measurements_csv(const std::filesystem::path& path, const RunLog& log);
void write_filter_log_csv(const std::filesystem::path& path, const RunLog& log);
void write_errors_csv(const std::filesystem::path& path, const RunLog& log);
void write_residuals_csv(const std::filesystem::path& path, const RunLog& log);
void write_mc_summary_csv(const std::filesystem::path& path, const McSummary& summary,
                          double threshold);
void write_whiteness_csv(const std::filesystem::path& path, const WhitenessReport& report);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);
/// Empty cells where a grade is missing.
void write_grade_gaps_csv(const std::filesystem::path& path, const SweepResult& result);
void write_jacobians_csv(const std::filesystem::path& path, const JacobianAudit& audit);

struct McSummaryRow {
  std::string state;
  std::int64_t inside = 0;
  std::int64_t samples = 0;
  double containment = 0.0;
  bool pass = false;
};

std::vector<McSummaryRow> read_mc_summary_csv(const std::filesystem::path& path);

/// Flat key/value YAML describing a command invocation. Deliberately free of
/// timestamps and host details so repeated runs produce identical files.
void write_manifest(const std::filesystem::path& path,
                    const std::map<std::string, std::string>& entries);

}  // namespace fidnav
