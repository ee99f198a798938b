#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "skb/commands.hpp"
#include "skb/config.hpp"
#include "skewbessel/error.hpp"
#include "skewbessel/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"skb: persistence exponents, exit laws and path simulation for integrals of "
               "skew Bessel processes"};
  app.set_version_flag("--version", std::string(skewbessel::kVersion));
  app.require_subcommand(1);
  app.footer(
      "Every key can be given in a --config file (key=value lines or a JSON object; a JSON "
      "report's config block is accepted) and overridden by the flag of the same name.\n"
      "Exit codes: 0 success, 1 failed check, 2 usage or config error.");

  const std::pair<const char*, const char*> commands[] = {
      {"exponents", "print nu, theta, alpha, beta, A, M-/M+ and identity residuals"},
      {"density", "tabulate z,pdf,cdf of a closed-form law (key: which)"},
      {"sample", "draw from an exact or rejection sampler (key: kind)"},
      {"simulate", "simulate paths of (X, Y) to a stop rule (key: stop)"},
      {"survival", "estimate P(T_b > t), fit the tail exponent and check the prefactor"},
      {"verify", "run a verification suite and write a JSON report (key: suite)"},
  };

  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "config file (key=value or JSON)");
    for (const auto& key : skb::config_keys()) {
      std::string h = key.help;
      if (*key.default_value) h += " [default: " + std::string(key.default_value) + "]";
      options[name][key.name] = sub->add_option(std::string("--") + key.name, values[key.name], h);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : skb::kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  skb::ExperimentConfig cfg;
  try {
    skb::RawConfig raw;
    if (!config_path.empty()) raw = skb::read_config_file(config_path);
    for (const auto& [key, opt] : options[name]) {
      if (opt->count() > 0) raw[key] = {values[key], "--" + key};
    }
    cfg = skb::resolve_config(raw);
  } catch (const skewbessel::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return skb::kExitConfig;
  }
  return skb::run_command(name, cfg, {std::cout, std::cerr});
}
