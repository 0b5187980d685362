#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cli_app.hpp>

using socnav::tools::CliConfig;

TEST_CASE("config round-trip through the serialized form is the identity") {
  CLI::App app{"test"};
  CliConfig first;
  socnav::tools::add_common_options(app, first);
  app.set_config("--config");
  std::vector<const char*> argv = {
      "socnav",          "--rho",        "0.2",  "--lambda", "500",
      "--noise-levels",  "0.01",         "0.03", "--v-max",  "0.5",
      "--seeds-per-cell", "4",           "--fallback", "brake"};
  app.parse(static_cast<int>(argv.size()), argv.data());

  const std::string serialized = app.config_to_str(true, false);
  const std::string tmp = "/tmp/socnav_cfg_roundtrip.toml";
  {
    std::ofstream out(tmp);
    out << serialized;
  }

  CLI::App app2{"test"};
  CliConfig second;
  socnav::tools::add_common_options(app2, second);
  app2.set_config("--config");
  std::vector<const char*> argv2 = {"socnav", "--config", tmp.c_str()};
  app2.parse(static_cast<int>(argv2.size()), argv2.data());

  CHECK(second.rho == first.rho);
  CHECK(second.lambda == first.lambda);
  CHECK(second.noise_levels == first.noise_levels);
  CHECK(second.v_max == first.v_max);
  CHECK(second.seeds_per_cell == first.seeds_per_cell);
  CHECK(second.fallback == first.fallback);
  CHECK(second.L == first.L);
  CHECK(second.dt == first.dt);

  // serializing again reproduces the same document
  const std::string serialized2 = app2.config_to_str(true, false);
  CHECK(serialized2 == serialized);
}

TEST_CASE("defaults carry the reference experiment parameters") {
  CliConfig cfg;
  CHECK(cfg.lambda == 1000.0);
  CHECK(cfg.v_max == 0.65);
  CHECK(cfg.rho == 0.177);
  CHECK(cfg.dt == 0.02);
  CHECK(cfg.alpha_h == 1.0);
  CHECK(cfg.L == std::vector<double>{0, 10, 3});
  CHECK(cfg.noise_levels == std::vector<double>{0.01, 0.02, 0.05});
  CHECK(cfg.bound_factor == 3.89);
}
