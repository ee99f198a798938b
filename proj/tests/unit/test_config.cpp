#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "skb/config.hpp"
#include "skewbessel/error.hpp"

using namespace skb;
using skewbessel::ConfigError;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("skb_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

std::string error_of(const RawConfig& raw) {
  try {
    (void)resolve_config(raw);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const ExperimentConfig c = resolve_config({});
    CHECK(c.params.delta == 1.0);
    CHECK(c.params.eta == 0.0);
    CHECK(c.interval.a == -1.0);
    CHECK(c.interval.b == 1.0);
    CHECK(c.replicas == 100000);
    CHECK(c.path.dt == 1e-4);
    CHECK(c.path.zero_band == doctest::Approx(0.0025));
    CHECK(c.path.step_growth == 1e-4);
    CHECK(c.path.bridge_zeros);
    CHECK(!c.seed);
    CHECK(c.workers >= 1);
    CHECK_THROWS_AS((void)c.require_seed(), ConfigError);
  }

  TEST_CASE("key=value files with comments") {
    const auto path = write_temp("kv.cfg", "# run\ndelta = 1.5\n\neta=0.3   # skew\nseed=7\n");
    const RawConfig raw = read_config_file(path);
    CHECK(raw.at("delta").value == "1.5");
    CHECK(raw.at("eta").value == "0.3");
    CHECK(raw.at("eta").origin.find("line 4") != std::string::npos);
    const ExperimentConfig c = resolve_config(raw);
    CHECK(c.params.delta == 1.5);
    CHECK(*c.seed == 7);
  }

  TEST_CASE("JSON files and reports feed back") {
    const auto plain = write_temp("plain.json", R"({"delta": 1.25, "seed": 3, "bridge_zeros": false})");
    const ExperimentConfig c = resolve_config(read_config_file(plain));
    CHECK(c.params.delta == 1.25);
    CHECK(!c.path.bridge_zeros);
    const auto report = write_temp("report.json", R"({"config": {"gamma": "2", "c": "0.5"}, "checks": []})");
    const ExperimentConfig r = resolve_config(read_config_file(report));
    CHECK(r.params.gamma_exp == 2.0);
    CHECK(r.params.c_weight == 0.5);
  }

  TEST_CASE("errors name the key and where it came from") {
    CHECK_THROWS_AS(read_config_file("/nonexistent/skb.cfg"), ConfigError);
    CHECK_THROWS_WITH_AS(read_config_file(write_temp("bad.cfg", "delta=1\nbogus=2\n")),
                         doctest::Contains("bogus"), ConfigError);
    CHECK_THROWS_WITH_AS(read_config_file(write_temp("bad2.cfg", "delta 1\n")), doctest::Contains("line 1"),
                         ConfigError);
    const std::string e = error_of({{"delta", {"2.5", "--delta"}}});
    CHECK(e.find("delta") != std::string::npos);
    CHECK(e.find("--delta") != std::string::npos);
    CHECK(error_of({{"eta", {"abc", "run.cfg line 2"}}}).find("run.cfg line 2") != std::string::npos);
    CHECK(error_of({{"t_points", {"1", "--t_points"}}}).find("t_points") != std::string::npos);
    CHECK(error_of({{"suite", {"everything", "--suite"}}}).find("suite") != std::string::npos);
    CHECK(error_of({{"dt", {"-1", "--dt"}}}).find("dt") != std::string::npos);
    CHECK(error_of({{"replicas", {"0", "--replicas"}}}).find("replicas") != std::string::npos);
    CHECK(error_of({{"nonsense", {"1", "--nonsense"}}}).find("nonsense") != std::string::npos);
  }

  TEST_CASE("echo lists resolved values and skips runtime-only keys") {
    const ExperimentConfig c = resolve_config({{"dt", {"1e-2", "--dt"}}, {"workers", {"3", "--workers"}},
                                               {"out", {"x.csv", "--out"}}});
    bool saw_dt = false;
    for (const auto& [k, v] : c.echo) {
      CHECK(!is_runtime_only(k));
      if (k == "dt") {
        saw_dt = true;
        CHECK(v == "1e-2");
      }
      if (k == "zero_band") CHECK(std::stod(v) == doctest::Approx(0.025));
      if (k == "step_growth") CHECK(std::stod(v) == 0.01);
    }
    CHECK(saw_dt);
    CHECK(is_runtime_only("workers"));
    CHECK(is_runtime_only("report"));
    CHECK(!c.echo_json().contains("workers"));
    CHECK(c.workers == 3);
  }

  TEST_CASE("echo resolves to the same configuration") {
    const ExperimentConfig c = resolve_config({{"delta", {"1.7", "--delta"}}, {"seed", {"11", "--seed"}}});
    RawConfig again;
    for (const auto& [k, v] : c.echo) again[k] = {v, "echo"};
    const ExperimentConfig d = resolve_config(again);
    CHECK(d.echo == c.echo);
  }

  TEST_CASE("survival time grid") {
    const ExperimentConfig c =
        resolve_config({{"t_min", {"1", "--t_min"}}, {"t_max", {"1000", "--t_max"}}, {"t_points", {"4", "--t_points"}}});
    const auto g = c.t_grid();
    REQUIRE(g.size() == 4);
    CHECK(g[0] == 1.0);
    CHECK(g[1] == doctest::Approx(10.0));
    CHECK(g[2] == doctest::Approx(100.0));
    CHECK(g[3] == 1000.0);
    const ExperimentConfig lin = resolve_config({{"t_min", {"1", ""}}, {"t_max", {"7", ""}}, {"t_points", {"4", ""}},
                                                 {"t_log", {"false", ""}}});
    CHECK(lin.t_grid()[1] == doctest::Approx(3.0));
  }
}
