#pragma once

// Experiment configuration for the skb tool: a flat set of keys read from a
// key=value or JSON file and overridden by command-line flags.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skewbessel/params.hpp"
#include "skewbessel/pathsim.hpp"

namespace skb {

struct KeySpec {
  const char* name;
  const char* default_value;  ///< empty string: no default
  const char* help;
};

/// Every recognised key, in echo order.
const std::vector<KeySpec>& config_keys();

/// Keys that affect how a run executes but not what it computes; they are
/// left out of the config echo.
bool is_runtime_only(const std::string& key);

struct ExperimentConfig {
  skewbessel::ModelParams params;
  skewbessel::Interval interval;
  double start_y = 0.0;
  std::optional<std::uint64_t> seed;
  std::uint64_t replicas = 0;
  int workers = 1;
  skewbessel::PathConfig path;
  double t_min = 1.0;
  int t_points = 41;
  bool t_log = true;
  double fit_decades = 1.0;
  double theta_tol = 0.07;
  std::optional<double> x2;
  std::optional<double> y2;
  std::string which;
  std::optional<double> z_min;
  std::optional<double> z_max;
  int grid_points = 2000;
  std::string suite;
  std::string stop;
  std::string kind;
  double level = 0.01;
  std::string out;
  std::string report;
  std::string trajectory;

  /// Resolved value of every non-runtime key, as strings, in echo order.
  std::vector<std::pair<std::string, std::string>> echo;

  [[nodiscard]] std::vector<double> t_grid() const;
  [[nodiscard]] std::uint64_t require_seed() const;
  [[nodiscard]] nlohmann::ordered_json echo_json() const;
};

/// Raw key/value pairs with a note of where each came from.
struct RawEntry {
  std::string value;
  std::string origin;  ///< e.g. "run.cfg line 4" or "--delta"
};
using RawConfig = std::map<std::string, RawEntry>;

/// Reads a key=value or JSON config file; throws skewbessel::ConfigError.
RawConfig read_config_file(const std::string& path);

/// Applies defaults, converts, and validates. Throws skewbessel::ConfigError
/// naming the offending key and its origin.
ExperimentConfig resolve_config(const RawConfig& raw);

}  // namespace skb
