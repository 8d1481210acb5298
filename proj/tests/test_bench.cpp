#include <gtest/gtest.h>

#include <sstream>

#include "neuropong/bench.hpp"
#include "neuropong/error.hpp"

using namespace neuropong;

TEST(Bench, ParseSizesAndModes) {
  EXPECT_EQ(bench::parse_sizes("32x32,32x64"), (std::vector<bench::Size>{{32, 32}, {32, 64}}));
  EXPECT_THROW(bench::parse_sizes("32by32"), ConfigError);
  EXPECT_THROW(bench::parse_sizes(""), ConfigError);
  EXPECT_EQ(bench::parse_mode("with-plasticity"), bench::Mode::kWithPlasticity);
  EXPECT_THROW(bench::parse_mode("fast"), ConfigError);
}

TEST(Bench, ValidateRejectsWarmupBeyondIterations) {
  bench::BenchConfig cfg;
  cfg.warmup = cfg.n_iterations;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Bench, SamplesReproduceSummary) {
  bench::BenchConfig cfg;
  cfg.n_iterations = 30;
  cfg.warmup = 5;
  cfg.sizes = {{32, 32}};
  cfg.pin_thread = false;
  const auto report = bench::run_bench(cfg);
  ASSERT_EQ(report.entries.size(), 2u);
  ASSERT_EQ(report.samples.size(), 50u);
  std::stringstream s;
  bench::write_samples_csv(s, report.samples);
  const auto entries = bench::summarize(bench::read_samples_csv(s));
  std::ostringstream a, b;
  bench::write_summary_csv(a, report.entries);
  bench::write_summary_csv(b, entries);
  EXPECT_EQ(a.str(), b.str());
  for (const auto& e : report.entries) {
    EXPECT_LE(e.p10_s, e.median_s);
    EXPECT_LE(e.median_s, e.p90_s);
    EXPECT_EQ(e.n_samples, 25u);
  }
}

TEST(Bench, LargerNetworksTakeLonger) {
  bench::BenchConfig cfg;
  cfg.n_iterations = 40;
  cfg.warmup = 5;
  cfg.sizes = {{32, 32}, {32, 128}};
  cfg.modes = {bench::Mode::kNoPlasticity};
  cfg.pin_thread = false;
  const auto report = bench::run_bench(cfg);
  ASSERT_EQ(report.entries.size(), 2u);
  EXPECT_GT(report.entries[1].median_s, report.entries[0].median_s);
}
