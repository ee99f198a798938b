#pragma once

// The skb subcommands. Each returns the process exit code: 0 on success,
// 1 when a verification check fails, 2 on usage or configuration errors.
// Commands write CSV to cfg.out and JSON to cfg.report, falling back to the
// given streams when the path is empty.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "skb/config.hpp"

namespace skb {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;

struct Check {
  std::string name;
  std::string formula;  ///< the relation being tested, in words
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Check with pass = statistic <= threshold.
Check at_most(std::string name, std::string formula, double statistic, double threshold);

/// {config, checks[], summary} with the library version in summary.
nlohmann::ordered_json make_report(const ExperimentConfig& cfg, const std::string& command,
                                   const std::vector<Check>& checks,
                                   nlohmann::ordered_json summary);

/// `# skb <version> <command>` followed by one `# key=value` line per echoed key.
std::string csv_header(const ExperimentConfig& cfg, const std::string& command);

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

int cmd_exponents(const ExperimentConfig& cfg, Streams io);
int cmd_density(const ExperimentConfig& cfg, Streams io);
int cmd_sample(const ExperimentConfig& cfg, Streams io);
int cmd_simulate(const ExperimentConfig& cfg, Streams io);
int cmd_survival(const ExperimentConfig& cfg, Streams io);
int cmd_verify(const ExperimentConfig& cfg, Streams io);

/// Checks run by `verify`, exposed for the test suite.
std::vector<Check> analytic_checks(const ExperimentConfig& cfg);
std::vector<Check> sampler_checks(const ExperimentConfig& cfg);
std::vector<Check> pathsim_checks(const ExperimentConfig& cfg);

/// Dispatches by name, translating library errors into exit codes.
int run_command(const std::string& name, const ExperimentConfig& cfg, Streams io);

}  // namespace skb
