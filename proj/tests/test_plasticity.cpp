#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "neuropong/plasticity.hpp"

using namespace neuropong;

namespace {

SpikeTrain random_train(Rng& rng, std::size_t n_units, std::size_t max_spikes, double duration) {
  std::uniform_int_distribution<std::size_t> count(0, max_spikes), unit(0, n_units - 1);
  std::uniform_real_distribution<double> time(0.0, duration);
  SpikeTrain t;
  t.n_units = n_units;
  t.duration_ms = duration;
  const std::size_t k = count(rng);
  for (std::size_t s = 0; s < k; ++s) {
    // Round some times to a 1 ms grid so that coincident spikes occur.
    double at = time(rng);
    if (s % 3 == 0) at = std::floor(at);
    t.events.push_back({at, unit(rng)});
  }
  std::sort(t.events.begin(), t.events.end());
  return t;
}

double oracle_trace(const SpikeTrain& pre, const SpikeTrain& post, const StdpKernel& k, std::size_t i,
                    std::size_t j, double saturation) {
  double sum = 0.0;
  for (const auto& a : pre.events) {
    if (a.unit != i) continue;
    for (const auto& b : post.events) {
      if (b.unit != j) continue;
      const double d = b.time_ms - a.time_ms;
      if (d > 0.0) sum += k.a_plus * std::exp(-d / k.tau_plus_ms);
      if (d < 0.0) sum -= k.a_minus * std::exp(d / k.tau_minus_ms);
    }
  }
  return std::clamp(sum, -saturation, saturation);
}

}  // namespace

TEST(Traces, SinglePairMatchesKernel) {
  SpikeTrain pre{{{10.0, 0}}, 1, 50.0}, post{{{12.0, 0}}, 1, 50.0};
  StdpKernel k;
  k.tau_plus_ms = 20.0;
  const auto e = accumulate_traces(pre, post, k, 1, 1);
  EXPECT_NEAR(e(0, 0), std::exp(-0.1), 1e-12);
  const auto anti = accumulate_traces(post, pre, k, 1, 1);
  EXPECT_NEAR(anti(0, 0), -std::exp(-0.1), 1e-12);
}

TEST(Traces, CoincidentSpikesDoNotPair) {
  SpikeTrain pre{{{5.0, 0}}, 1, 50.0}, post{{{5.0, 0}}, 1, 50.0};
  EXPECT_EQ(accumulate_traces(pre, post, StdpKernel{}, 1, 1)(0, 0), 0.0);
}

TEST(Traces, MatchesAllPairsOracle) {
  Rng rng(2024);
  StdpKernel k;
  k.a_minus = 0.7;
  k.tau_minus_ms = 13.0;
  TraceConfig storage;
  for (int trial = 0; trial < 100; ++trial) {
    const auto pre = random_train(rng, 3, 10, 50.0);
    const auto post = random_train(rng, 4, 10, 50.0);
    const auto e = accumulate_traces(pre, post, k, 3, 4, storage);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        const double want = oracle_trace(pre, post, k, i, j, storage.saturation);
        ASSERT_LE(std::abs(e(i, j) - want), 1e-9 * std::max(1.0, std::abs(want)))
            << "trial " << trial << " synapse " << i << "," << j;
      }
    }
  }
}

TEST(Traces, SaturateAtBound) {
  SpikeTrain pre{{}, 1, 50.0}, post{{}, 1, 50.0};
  for (int s = 0; s < 40; ++s) {
    pre.events.push_back({s * 1.0, 0});
    post.events.push_back({s * 1.0 + 0.5, 0});
  }
  StdpKernel k;
  k.a_minus = 0.0;
  const auto e = accumulate_traces(pre, post, k, 1, 1);
  EXPECT_EQ(e(0, 0), 16.0);
}

TEST(Digitize, BoundedErrorAndIdempotent) {
  TraceConfig storage;
  EligibilityMatrix e(4, 4, storage);
  Rng rng(5);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) e.set(i, j, u(rng));
  const auto d = digitize(e);
  const auto dd = digitize(d);
  EXPECT_EQ(d, dd);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_LE(std::abs(d(i, j) - e(i, j)), e.adc_step() / 2 + 1e-12);
      EXPECT_LE(std::abs(d(i, j)), storage.saturation);
    }
  }
}

TEST(Digitize, ZeroIsACode) {
  TraceConfig storage;
  EXPECT_EQ(digitize_value(0.0, storage), 0.0);
  EXPECT_EQ(digitize_value(1e-4, storage), 0.0);
  EXPECT_EQ(digitize_value(16.0, storage), 16.0);
  EXPECT_EQ(digitize_value(-16.0, storage), -16.0);
  EXPECT_DOUBLE_EQ(EligibilityMatrix(1, 1, storage).adc_step(), 32.0 / 254.0);
}

TEST(Rstdp, FixedPointWhenRewardEqualsBaseline) {
  Rng rng(77);
  std::uniform_int_distribution<int> level(0, 63);
  std::uniform_real_distribution<double> trace(-16.0, 16.0), reward(0.0, 1.0);
  RstdpConfig cfg;
  for (int t = 0; t < 1000; ++t) {
    SynapseMatrix w(4, 4);
    EligibilityMatrix e(4, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        w.set_raw(i, j, level(rng));
        e.set(i, j, trace(rng));
      }
    }
    const double r = reward(rng);
    ASSERT_EQ(rstdp_update(w, digitize(e), r, r, cfg), w);
  }
}

TEST(Rstdp, WeightsStayRepresentableAndBounded) {
  Rng rng(78);
  std::uniform_int_distribution<int> level(0, 63);
  std::uniform_real_distribution<double> trace(-16.0, 16.0), unit(0.0, 1.0);
  RstdpConfig cfg;
  cfg.eta = 5.3;
  for (int t = 0; t < 200; ++t) {
    SynapseMatrix w(3, 3);
    EligibilityMatrix e(3, 3);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        w.set_raw(i, j, level(rng));
        e.set(i, j, trace(rng));
      }
    }
    const auto next = rstdp_update(w, e, unit(rng), unit(rng), cfg);
    for (double v : next.values()) {
      ASSERT_TRUE(next.representable(v));
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 63.0);
    }
  }
}

TEST(Rstdp, SignFollowsRewardError) {
  SynapseMatrix w(1, 2);
  w.set(0, 0, 30.0);
  w.set(0, 1, 30.0);
  EligibilityMatrix e(1, 2);
  e.set(0, 0, 2.0);
  e.set(0, 1, -2.0);
  RstdpConfig cfg;
  const auto up = rstdp_update(w, e, 1.0, 0.5, cfg);
  EXPECT_EQ(up(0, 0), 38.0);  // 8 * 0.5 * 2
  EXPECT_EQ(up(0, 1), 22.0);
  const auto down = rstdp_update(w, e, 0.0, 0.5, cfg);
  EXPECT_EQ(down(0, 0), 22.0);
  EXPECT_EQ(down(0, 1), 38.0);
}

TEST(Rstdp, ContinuousModeOnlyClips) {
  SynapseMatrix w(1, 1, 0.0, 1.0, SynapseMatrix::kContinuous);
  w.set(0, 0, 0.5);
  EligibilityMatrix e(1, 1);
  e.set(0, 0, 0.1);
  RstdpConfig cfg;
  cfg.eta = 1.0;
  EXPECT_DOUBLE_EQ(rstdp_update(w, e, 0.3, 0.0, cfg)(0, 0), 0.53);
  EXPECT_EQ(rstdp_update(w, e, 100.0, 0.0, cfg)(0, 0), 1.0);
}

TEST(Rstdp, StochasticRoundingIsUnbiased) {
  SynapseMatrix w(1, 1);
  w.set(0, 0, 10.0);
  EligibilityMatrix e(1, 1);
  e.set(0, 0, 0.25);
  RstdpConfig cfg;
  cfg.eta = 1.0;
  cfg.stochastic_rounding = true;
  Rng rng(3);
  double sum = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double v = rstdp_update(w, e, 1.0, 0.0, cfg, &rng)(0, 0);
    ASSERT_TRUE(v == 10.0 || v == 11.0);
    sum += v;
  }
  EXPECT_NEAR(sum / n, 10.25, 0.02);
}

TEST(Baseline, ConvergesGeometrically) {
  RstdpConfig cfg;
  auto b = RewardBaseline::make(BaselineMode::kPerState, 4, 0.5);
  for (int k = 1; k <= 30; ++k) {
    b = update_baseline(b, 1.0, 2, cfg);
    ASSERT_NEAR(b.value(2), 1.0 - 0.5 * std::pow(0.8, k), 1e-12);
  }
  EXPECT_EQ(b.value(0), 0.5);
}

TEST(Baseline, GlobalModeSharesOneEntry) {
  RstdpConfig cfg;
  cfg.baseline_mode = BaselineMode::kGlobal;
  auto b = RewardBaseline::make(BaselineMode::kGlobal, 4);
  b = update_baseline(b, 1.0, 3, cfg);
  EXPECT_NEAR(b.value(0), 0.2, 1e-15);
  EXPECT_NEAR(b.value(3), 0.2, 1e-15);
}
