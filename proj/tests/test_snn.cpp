#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "neuropong/error.hpp"
#include "neuropong/snn.hpp"

using namespace neuropong;

namespace {

double analytic_rate_hz(const NeuronParams& p, double drive) {
  const double v_inf = p.v_rest_mv + drive;
  if (v_inf <= p.v_thresh_mv) return 0.0;
  const double isi_ms = p.tau_refrac_ms + p.tau_m_ms * std::log((v_inf - p.v_reset_mv) / (v_inf - p.v_thresh_mv));
  return 1000.0 / isi_ms;
}

// Standard deviation of N(0, sigma) truncated to (-inf, b].
double upper_truncated_sd(double sigma, double b) {
  const double beta = b / sigma;
  const double phi = std::exp(-0.5 * beta * beta) / std::sqrt(2.0 * M_PI);
  const double cdf = 0.5 * std::erfc(-beta / std::sqrt(2.0));
  const double lambda = phi / cdf;
  return sigma * std::sqrt(1.0 - beta * lambda - lambda * lambda);
}

double sample_sd(const std::vector<double>& x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace

TEST(Lif, ZeroInputDecayMatchesClosedForm) {
  NeuronParams p;
  const double dt = 0.01 * p.tau_m_ms;
  NeuronState s{-58.0, 0.0, 0.0};
  for (int k = 1; k <= 500; ++k) {
    s = lif_step(s, p, 0.0, 0.0, dt).state;
    const double expected = (-58.0 - p.v_rest_mv) * std::exp(-k * dt / p.tau_m_ms);
    ASSERT_NEAR((s.v_mv - p.v_rest_mv) / expected, 1.0, 1e-3) << "step " << k;
  }
}

TEST(Lif, SynapticCurrentDecaysExponentially) {
  NeuronParams p;
  const NeuronState s{p.v_rest_mv, 10.0, 0.0};
  const auto next = lif_step(s, p, 0.0, 0.0, 0.5);
  EXPECT_NEAR(next.state.i_syn, 10.0 * std::exp(-0.1), 1e-12);
  EXPECT_NEAR(next.state.i_syn, 9.048374180359595, 1e-12);
}

TEST(Lif, FiringRateMatchesAnalyticCurve) {
  NeuronParams p;
  const double dt = 0.1;
  for (double drive : {12.0, 15.0, 20.0, 30.0, 50.0}) {
    NeuronState s = NeuronState::at_rest(p);
    int spikes = 0;
    const int steps = static_cast<int>(2000.0 / dt);
    for (int k = 0; k < steps; ++k) {
      const auto r = lif_step(s, p, drive, 0.0, dt);
      s = r.state;
      spikes += r.spiked ? 1 : 0;
    }
    const double rate = spikes / 2.0;
    const double expected = analytic_rate_hz(p, drive);
    EXPECT_NEAR(rate / expected, 1.0, 0.05) << "drive " << drive;
  }
}

TEST(Lif, SubthresholdDriveNeverSpikes) {
  NeuronParams p;
  NeuronState s = NeuronState::at_rest(p);
  for (int k = 0; k < 20000; ++k) {
    const auto r = lif_step(s, p, 9.9, 0.0, 0.1);
    ASSERT_FALSE(r.spiked);
    s = r.state;
  }
}

TEST(Lif, StabilityGuardRejectsCoarseSteps) {
  NeuronParams p;
  EXPECT_NO_THROW(check_stability(p, 1.0));
  EXPECT_THROW(check_stability(p, 1.01), ConfigError);
  EXPECT_THROW(check_stability(p, 0.0), ConfigError);
}

TEST(Lif, InvalidParamsRejected) {
  NeuronParams p;
  p.v_thresh_mv = -70.0;
  EXPECT_FALSE(p.valid());
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(Poisson, CountMatchesRate) {
  const auto train = poisson_encode(3, 8, 50.0, 0.0, 100000.0, 7);
  const auto counts = train.counts();
  EXPECT_NEAR(static_cast<double>(counts[3]), 5000.0, 3.0 * std::sqrt(5000.0));
  for (std::size_t u = 0; u < counts.size(); ++u)
    if (u != 3) EXPECT_EQ(counts[u], 0u);
  EXPECT_TRUE(train.well_formed());
}

TEST(Poisson, BackgroundRateApplies) {
  const auto train = poisson_encode(0, 4, 70.0, 10.0, 100000.0, 9);
  const auto counts = train.counts();
  for (std::size_t u = 1; u < 4; ++u) EXPECT_NEAR(static_cast<double>(counts[u]), 1000.0, 3.0 * std::sqrt(1000.0));
}

TEST(Poisson, DeterministicGivenSeed) {
  EXPECT_EQ(poisson_encode(1, 32, 70.0, 0.0, 50.0, 3), poisson_encode(1, 32, 70.0, 0.0, 50.0, 3));
  EXPECT_NE(poisson_encode(1, 32, 70.0, 0.0, 500.0, 3), poisson_encode(1, 32, 70.0, 0.0, 500.0, 4));
}

TEST(Poisson, RejectsBadArguments) {
  EXPECT_THROW(poisson_encode(5, 4, 70.0, 0.0, 50.0, 1), ParameterError);
  EXPECT_THROW(poisson_encode(0, 4, -1.0, 0.0, 50.0, 1), ParameterError);
}

TEST(Trial, OutputIsWellFormedAndDeterministic) {
  SynapseMatrix w(8, 8);
  for (std::size_t i = 0; i < 8; ++i) w.set(i, i, 63.0);
  const auto pop = Population::uniform(NeuronParams{}, 8);
  const auto input = poisson_encode(2, 8, 70.0, 0.0, 50.0, 5);
  SimConfig sim;
  NoiseConfig noise;
  const auto a = run_trial(w, pop, input, sim, noise, 11);
  const auto b = run_trial(w, pop, input, sim, noise, 11);
  EXPECT_EQ(a.output, b.output);
  EXPECT_TRUE(a.output.well_formed());
  EXPECT_EQ(a.output.n_units, 8u);
  EXPECT_GT(a.output.counts()[2], 0u);
}

TEST(Trial, ZeroNoiseIgnoresNoiseSeed) {
  SynapseMatrix w(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) w.set(i, j, 40.0);
  const auto pop = Population::uniform(NeuronParams{}, 4);
  const auto input = poisson_encode(0, 4, 70.0, 0.0, 50.0, 5);
  NoiseConfig quiet;
  quiet.trial_noise_current_sigma = 0.0;
  EXPECT_EQ(run_trial(w, pop, input, SimConfig{}, quiet, 1).output,
            run_trial(w, pop, input, SimConfig{}, quiet, 2).output);
}

TEST(Trial, ShapeMismatchRejected) {
  SynapseMatrix w(4, 5);
  const auto pop = Population::uniform(NeuronParams{}, 4);
  const auto input = poisson_encode(0, 4, 70.0, 0.0, 50.0, 5);
  EXPECT_THROW(run_trial(w, pop, input, SimConfig{}, NoiseConfig{}, 1), ParameterError);
}

TEST(Trial, FiringRatesCountPerSecond) {
  SpikeTrain t;
  t.n_units = 2;
  t.duration_ms = 50.0;
  t.events = {{1.0, 0}, {2.0, 0}, {3.0, 1}};
  const auto r = firing_rates(t, 2, 50.0);
  EXPECT_DOUBLE_EQ(r[0], 40.0);
  EXPECT_DOUBLE_EQ(r[1], 20.0);
}

TEST(FixedPattern, ZeroSigmaIsNominal) {
  NeuronParams p;
  for (const auto& q : apply_fixed_pattern_noise(p, 16, 0.0, 1)) EXPECT_EQ(q, p);
}

TEST(FixedPattern, RelativeSpreadMatchesSigma) {
  // Nominal far from every invariant boundary, so truncation is negligible.
  NeuronParams p;
  p.v_thresh_mv = -30.0;
  const auto params = apply_fixed_pattern_noise(p, 20000, 0.1, 3);
  std::vector<double> th, tau;
  for (const auto& q : params) {
    th.push_back(q.v_thresh_mv / p.v_thresh_mv - 1.0);
    tau.push_back(q.tau_m_ms / p.tau_m_ms - 1.0);
    EXPECT_EQ(q.v_rest_mv, p.v_rest_mv);
    EXPECT_EQ(q.tau_syn_ms, p.tau_syn_ms);
  }
  EXPECT_NEAR(sample_sd(th), 0.1, 0.005);
  EXPECT_NEAR(sample_sd(tau), 0.1, 0.005);
}

TEST(FixedPattern, DefaultNominalFollowsTruncatedNormal) {
  // A threshold below rest is invalid, which cuts eps off at (v_rest / v_thresh - 1).
  NeuronParams p;
  const auto params = apply_fixed_pattern_noise(p, 20000, 0.1, 4);
  std::vector<double> eps;
  for (const auto& q : params) {
    ASSERT_TRUE(q.valid());
    eps.push_back(q.v_thresh_mv / p.v_thresh_mv - 1.0);
  }
  const double cut = p.v_rest_mv / p.v_thresh_mv - 1.0;
  EXPECT_NEAR(sample_sd(eps), upper_truncated_sd(0.1, cut), 0.003);
}

TEST(FixedPattern, DeterministicGivenSeed) {
  NeuronParams p;
  EXPECT_EQ(apply_fixed_pattern_noise(p, 32, 0.1, 5), apply_fixed_pattern_noise(p, 32, 0.1, 5));
}
