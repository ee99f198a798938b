#include "skb/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "skewbessel/error.hpp"

namespace skb {

using skewbessel::ConfigError;

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = {
      {"delta", "1", "dimension of the Bessel process, in [1, 2)"},
      {"eta", "0", "skewness, in (-1, 1)"},
      {"gamma", "1", "power of |y| in the functional, > 0"},
      {"c", "1", "weight of the negative half-line, > 0"},
      {"a", "-1", "lower level"},
      {"b", "1", "upper level"},
      {"x", "0", "start of X"},
      {"y", "0", "start of Y"},
      {"seed", "", "64-bit seed; required by randomized commands"},
      {"replicas", "100000", "number of Monte Carlo replicas or draws"},
      {"workers", "", "worker threads (default: hardware threads)"},
      {"dt", "1e-4", "base time step of the path simulator"},
      {"t_max", "10000", "simulation horizon"},
      {"zero_band", "", "|Y| threshold treated as a zero (default sqrt(dt)/4)"},
      {"record_stride", "0", "trajectory thinning; 0 disables trajectory output"},
      {"step_growth", "", "scale-adaptive step factor (default: dt; 0 = fixed step)"},
      {"bridge_zeros", "true", "also detect zeros of |Y| between steps by the exact bridge test"},
      {"t_min", "1", "smallest time of the survival grid"},
      {"t_points", "41", "number of survival grid points"},
      {"t_log", "true", "log-spaced survival grid"},
      {"fit_decades", "1", "decades of the grid top used by the tail fit"},
      {"theta_tol", "0.07", "survival: allowed |theta_hat - theta|"},
      {"x2", "", "second start of X for the prefactor ratio check"},
      {"y2", "", "second start of Y for the prefactor ratio check (default y)"},
      {"which", "exit_position_y0",
       "density: x_sigma0|overshoot|exit_system|exit_position_y0|exit_position_general"},
      {"z_min", "", "density grid start (default: law quantile 1e-5)"},
      {"z_max", "", "density grid end (default: law quantile 1 - 1e-5)"},
      {"grid_points", "2000", "density grid size"},
      {"suite", "all", "verify suite: analytic|sampler|pathsim|all"},
      {"stop", "T_ab", "simulate stop rule: sigma0|T_b|T_ab|zeta_b|zeta_ab|horizon"},
      {"kind", "x_sigma0", "sample law: x_sigma0|overshoot|exit_system|exit_position|zeta_b"},
      {"level", "0.01", "significance level of KS and binomial checks"},
      {"out", "", "CSV output path (default: stdout)"},
      {"report", "", "JSON report path (default: stdout)"},
      {"trajectory", "", "CSV path for the trajectory of replica 0"},
  };
  return keys;
}

bool is_runtime_only(const std::string& key) {
  return key == "workers" || key == "out" || key == "report" || key == "trajectory";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool known_key(const std::string& k) {
  for (const auto& spec : config_keys()) {
    if (k == spec.name) return true;
  }
  return false;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Resolver {
 public:
  explicit Resolver(const RawConfig& raw) : raw_(raw) {}

  std::string str(const std::string& key) const {
    auto it = raw_.find(key);
    if (it != raw_.end()) return it->second.value;
    for (const auto& spec : config_keys()) {
      if (key == spec.name) return spec.default_value;
    }
    throw ConfigError("internal: unknown key " + key);
  }
  bool has(const std::string& key) const { return !str(key).empty(); }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    auto it = raw_.find(key);
    const std::string origin = it != raw_.end() ? it->second.origin : "default";
    throw ConfigError("config key '" + key + "' (" + origin + "): " + why);
  }

  double num(const std::string& key) const {
    const std::string s = str(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) fail(key, "not a finite number: '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      fail(key, "not a number: '" + s + "'");
    }
  }
  std::uint64_t count(const std::string& key) const {
    const std::string s = str(key);
    try {
      if (!s.empty() && s[0] == '-') fail(key, "must be non-negative: '" + s + "'");
      std::size_t used = 0;
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size()) {
        // accept integral values written in floating notation, e.g. 1e5
        const double d = num(key);
        if (d < 0 || d != std::floor(d) || d > 1.8e19) fail(key, "not a count: '" + s + "'");
        return static_cast<std::uint64_t>(d);
      }
      return v;
    } catch (const std::logic_error&) {
      fail(key, "not a count: '" + s + "'");
    }
  }
  bool flag(const std::string& key) const {
    const std::string s = str(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(key, "not a boolean: '" + s + "'");
  }
  std::string choice(const std::string& key, std::initializer_list<const char*> options) const {
    const std::string s = str(key);
    for (const char* o : options) {
      if (s == o) return s;
    }
    std::string all;
    for (const char* o : options) all += std::string(all.empty() ? "" : "|") + o;
    fail(key, "must be one of " + all + ", got '" + s + "'");
  }

 private:
  const RawConfig& raw_;
};

}  // namespace

RawConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  RawConfig raw;
  if (trim(text).rfind('{', 0) == 0) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file '" + path + "': invalid JSON: " + e.what());
    }
    // A JSON report can be fed back: its resolved config echo is used.
    if (j.contains("config") && j["config"].is_object()) j = j["config"];
    if (!j.is_object()) throw ConfigError("config file '" + path + "': expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!known_key(it.key())) throw ConfigError("config file '" + path + "': unknown key '" + it.key() + "'");
      std::string v;
      if (it->is_string()) {
        v = it->get<std::string>();
      } else if (it->is_boolean()) {
        v = it->get<bool>() ? "true" : "false";
      } else if (it->is_number_integer() || it->is_number_unsigned()) {
        v = it->dump();
      } else if (it->is_number()) {
        v = fmt(it->get<double>());
      } else if (it->is_null()) {
        v = "";
      } else {
        throw ConfigError("config file '" + path + "': key '" + it.key() + "' must be a scalar");
      }
      raw[it.key()] = {v, path + " key " + it.key()};
    }
    return raw;
  }
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path + " line " + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (!known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    raw[key] = {trim(line.substr(eq + 1)), where};
  }
  return raw;
}

ExperimentConfig resolve_config(const RawConfig& raw) {
  for (const auto& [k, v] : raw) {
    if (!known_key(k)) throw ConfigError("unknown config key '" + k + "' (" + v.origin + ")");
  }
  const Resolver r(raw);
  ExperimentConfig c;
  c.params = {r.num("delta"), r.num("eta"), r.num("gamma"), r.num("c")};
  try {
    c.params.validate();
  } catch (const skewbessel::DomainError& e) {
    const std::string msg = e.what();
    const std::string key = msg.rfind("delta", 0) == 0   ? "delta"
                            : msg.rfind("eta", 0) == 0   ? "eta"
                            : msg.rfind("gamma", 0) == 0 ? "gamma"
                                                         : "c";
    r.fail(key, msg);
  }
  c.interval = {r.num("a"), r.num("b"), r.num("x")};
  c.start_y = r.num("y");
  if (r.has("seed")) c.seed = r.count("seed");
  c.replicas = r.count("replicas");
  if (c.replicas == 0) r.fail("replicas", "must be at least 1");
  c.workers = r.has("workers") ? static_cast<int>(r.count("workers"))
                               : skewbessel::default_workers();
  if (c.workers < 1) r.fail("workers", "must be at least 1");

  c.path.dt = r.num("dt");
  c.path.t_max = r.num("t_max");
  c.path.zero_band = r.has("zero_band") ? r.num("zero_band") : 0.0;
  c.path.record_stride = static_cast<int>(r.count("record_stride"));
  c.path.bridge_zeros = r.flag("bridge_zeros");
  c.path.step_growth = r.has("step_growth") ? r.num("step_growth") : c.path.dt;
  try {
    c.path.validate();
  } catch (const ConfigError& e) {
    r.fail(std::string(e.what()).rfind("zero_band", 0) == 0 ? "zero_band" : "dt", e.what());
  }
  c.path.zero_band = c.path.band();

  c.t_min = r.num("t_min");
  c.t_points = static_cast<int>(r.count("t_points"));
  c.t_log = r.flag("t_log");
  c.fit_decades = r.num("fit_decades");
  if (!(c.t_min > 0.0 && c.t_min < c.path.t_max)) r.fail("t_min", "must lie in (0, t_max)");
  if (c.t_points < 2) r.fail("t_points", "need at least 2 grid points");
  if (!(c.fit_decades > 0.0)) r.fail("fit_decades", "must be positive");
  c.theta_tol = r.num("theta_tol");
  if (!(c.theta_tol > 0.0)) r.fail("theta_tol", "must be positive");
  if (r.has("x2")) c.x2 = r.num("x2");
  if (r.has("y2")) c.y2 = r.num("y2");

  c.which = r.choice("which", {"x_sigma0", "overshoot", "exit_system", "exit_position_y0",
                               "exit_position_general"});
  if (r.has("z_min")) c.z_min = r.num("z_min");
  if (r.has("z_max")) c.z_max = r.num("z_max");
  c.grid_points = static_cast<int>(r.count("grid_points"));
  if (c.grid_points < 2) r.fail("grid_points", "need at least 2 points");
  if (c.z_min && c.z_max && !(*c.z_min < *c.z_max)) r.fail("z_max", "must exceed z_min");
  c.suite = r.choice("suite", {"analytic", "sampler", "pathsim", "all"});
  c.stop = r.choice("stop", {"sigma0", "T_b", "T_ab", "zeta_b", "zeta_ab", "horizon"});
  c.kind = r.choice("kind", {"x_sigma0", "overshoot", "exit_system", "exit_position", "zeta_b"});
  c.level = r.num("level");
  if (!(c.level > 0.0 && c.level < 1.0)) r.fail("level", "must lie in (0, 1)");
  c.out = r.str("out");
  c.report = r.str("report");
  c.trajectory = r.str("trajectory");

  for (const auto& spec : config_keys()) {
    const std::string k = spec.name;
    if (is_runtime_only(k)) continue;
    std::string v = r.str(k);
    if (k == "zero_band") v = fmt(c.path.zero_band);
    if (k == "step_growth") v = fmt(c.path.step_growth);
    c.echo.emplace_back(k, v);
  }
  return c;
}

std::vector<double> ExperimentConfig::t_grid() const {
  std::vector<double> g(t_points);
  for (int i = 0; i < t_points; ++i) {
    const double f = static_cast<double>(i) / (t_points - 1);
    g[i] = t_log ? t_min * std::pow(path.t_max / t_min, f) : t_min + f * (path.t_max - t_min);
  }
  g.back() = path.t_max;
  return g;
}

std::uint64_t ExperimentConfig::require_seed() const {
  if (!seed) throw ConfigError("this command is randomized and needs an explicit seed (--seed)");
  return *seed;
}

nlohmann::ordered_json ExperimentConfig::echo_json() const {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : echo) j[k] = v;
  return j;
}

}  // namespace skb
