#include <gtest/gtest.h>

#include <set>

#include "neuropong/error.hpp"
#include "settings.hpp"

using namespace neuropong;
using namespace neuropong::cli;

TEST(Settings, DottedOverrides) {
  Settings s;
  apply(s, "experiment.iterations", "123");
  apply(s, "noise.fixed_pattern_sigma", "0.1");
  apply(s, "plasticity.baseline_mode", "global");
  apply(s, "bench.sizes", "32x64");
  EXPECT_EQ(s.experiment.n_iterations, 123u);
  EXPECT_EQ(s.experiment.noise.fixed_pattern_sigma, 0.1);
  EXPECT_EQ(s.experiment.rstdp.baseline_mode, BaselineMode::kGlobal);
  EXPECT_EQ(s.bench.sizes, (std::vector<bench::Size>{{32, 64}}));
}

TEST(Settings, BadKeysAndValuesNamed) {
  Settings s;
  try {
    apply(s, "snn.tau_m", "3");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("snn.tau_m"), std::string::npos);
  }
  EXPECT_THROW(apply(s, "experiment.iterations", "-4"), ConfigError);
  EXPECT_THROW(apply(s, "experiment.iterations", "12abc"), ConfigError);
  EXPECT_THROW(apply(s, "experiment.schedule", "sideways"), ConfigError);
  EXPECT_THROW(apply(s, "noise", "1"), ConfigError);
}

TEST(Settings, IniParsing) {
  Settings s;
  load_ini_text(s,
                "# comment\n[experiment]\niterations = 77  # trailing\nseed=5\n\n; other\n[snn]\ndt_ms = 0.05\n",
                "test.ini");
  EXPECT_EQ(s.experiment.n_iterations, 77u);
  EXPECT_EQ(s.experiment.seed, 5u);
  EXPECT_EQ(s.experiment.sim.dt_ms, 0.05);
}

TEST(Settings, IniErrorsCarryLineNumbers) {
  Settings s;
  auto message = [&](const std::string& text) {
    try {
      load_ini_text(s, text, "x.ini");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("[experiment]\nbogus = 1\n").find("x.ini:2"), std::string::npos);
  EXPECT_NE(message("[nowhere]\n").find("x.ini:1"), std::string::npos);
  EXPECT_NE(message("iterations = 3\n").find("x.ini:1"), std::string::npos);
  EXPECT_NE(message("[experiment]\n\niterations 3\n").find("x.ini:3"), std::string::npos);
}

TEST(Settings, IniAndJsonRoundTrip) {
  Settings s;
  apply(s, "experiment.seed", "42");
  apply(s, "plasticity.eta", "3.25");
  apply(s, "experiment.fixed_pattern_seed", "9");
  Settings from_ini;
  load_ini_text(from_ini, to_ini(s), "roundtrip");
  EXPECT_EQ(to_ini(from_ini), to_ini(s));
  Settings from_js;
  from_json(from_js, to_json(s), "roundtrip");
  EXPECT_EQ(to_json(from_js), to_json(s));
  EXPECT_EQ(from_js.experiment.fixed_pattern_seed, std::optional<std::uint64_t>(9));
}

TEST(Settings, EveryKeyIsListedOnce) {
  std::set<std::string> seen;
  for (const auto& k : keys()) EXPECT_TRUE(seen.insert(k.dotted()).second) << k.dotted();
  EXPECT_GT(seen.size(), 40u);
}
