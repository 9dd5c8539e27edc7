#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fidnav/scenario.hpp"

namespace fidnav {

/// Missing file, YAML syntax error, unknown key or invalid value. The message
/// names the offending field, e.g. "fiducials.spacing_m: must be positive".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a YAML scenario. Omitted fields keep the nominal defaults; the
/// result is validated.
ScenarioConfig parse_config(std::string_view yaml_text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Commented YAML that parse_config() maps back to an identical config.
std::string save_config(const ScenarioConfig& config);

}  // namespace fidnav
