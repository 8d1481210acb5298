#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "neuropong/plasticity.hpp"
#include "neuropong/pong.hpp"
#include "neuropong/random.hpp"
#include "neuropong/snn.hpp"
#include "neuropong/synapse_matrix.hpp"

namespace neuropong {

enum class StateSchedule { kCyclic, kUniformRandom };

struct WeightInit {
  // Initial weights are uniform over the lowest `fraction` of [w_min, w_max].
  double fraction = 0.25;
  double w_min = 0.0;
  double w_max = 63.0;
  std::size_t levels = 64;
};

struct ExperimentConfig {
  std::size_t n_iterations = 2000;
  StateSchedule schedule = StateSchedule::kUniformRandom;
  std::uint64_t seed = 1;
  std::size_t eval_every = 100;
  std::size_t eval_repeats = 5;
  bool record_wall_time = false;
  // Seed of the fixed-pattern draw; unset derives it from `seed`.
  std::optional<std::uint64_t> fixed_pattern_seed;
  int permutation_shuffles = 1000;

  NeuronParams neuron;
  SimConfig sim;
  StdpKernel kernel;
  TraceConfig traces;
  RstdpConfig rstdp;
  // Starting value of every baseline entry. Above zero so that unrewarded
  // actions are depressed before the first reward arrives.
  double initial_baseline = 0.5;
  WeightInit weights;
  FieldConfig env;
  RewardSchedule reward;
  NoiseConfig noise;

  std::size_t n_units() const noexcept { return env.n_columns; }
  // Throws ConfigError with the offending key.
  void validate() const;
};

struct IterationLog {
  std::size_t iteration = 0;
  std::size_t state = 0;
  std::size_t action = 0;
  double reward = 0.0;
  double baseline = 0.0;  // value used for the update (pre-EMA)
  std::vector<double> rates_hz;
  double weight_delta_norm = 0.0;
  double wall_time_s = 0.0;
  friend bool operator==(const IterationLog&, const IterationLog&) = default;
};

struct CurvePoint {
  std::size_t iteration = 0;
  double value = 0.0;
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
};

struct Metrics {
  double initial_catch_fraction = 0.0;
  std::vector<CurvePoint> catch_fraction_curve;
  std::vector<CurvePoint> mean_reward_curve;
  double diagonal_dominance = 0.0;
  // Empty when the excitability proxy has zero variance.
  std::optional<CorrelationResult> weight_excitability;
};

// State carried across closed-loop iterations.
struct LoopState {
  SynapseMatrix weights;
  RewardBaseline baseline;
  Rng rng;  // tie-breaking and schedule draws
};

// Mutable context of a run that is fixed after setup.
struct Setup {
  Population population;
  SynapseMatrix initial_weights;
};

Setup make_setup(const ExperimentConfig& cfg);

// One closed-loop step: encode `state`, run a noisy trial, read out the
// argmax action, reward it, then apply R-STDP with the baseline value from
// before this iteration's EMA step.
IterationLog run_iteration(LoopState& loop, const Population& population, std::size_t state,
                           std::size_t iteration, const ExperimentConfig& cfg);

// Index of the largest value; ties are broken uniformly at random.
std::size_t argmax_random_tie(const std::vector<double>& values, Rng& rng);

// Mean noise-free rate vector per state over cfg.eval_repeats trials.
std::vector<std::vector<double>> evaluation_rates(const SynapseMatrix& weights,
                                                  const Population& population,
                                                  const ExperimentConfig& cfg);

// Argmax action per state of the noise-free evaluation rates.
Policy greedy_policy(const SynapseMatrix& weights, const Population& population,
                     const ExperimentConfig& cfg, std::uint64_t tie_seed);

// The policy every evaluation scores. Tie-breaking draws from one fixed
// stream per run, so equal weights always give the same policy.
Policy evaluation_policy(const SynapseMatrix& weights, const Population& population,
                         const ExperimentConfig& cfg);

double diagonal_dominance(const SynapseMatrix& weights);

// Spearman rank correlation between (v_thresh - v_rest) and w[j][j].
double weight_excitability_correlation(const SynapseMatrix& weights, const Population& population);

CorrelationResult weight_excitability_test(const SynapseMatrix& weights,
                                           const Population& population, int n_shuffles,
                                           std::uint64_t seed);

// Mean reward over each eval window, reported at the window's end iteration.
std::vector<CurvePoint> mean_reward_curve(const std::vector<IterationLog>& logs,
                                          std::size_t eval_every);

// Iteration counts after which the greedy policy is evaluated.
std::vector<std::size_t> evaluation_points(std::size_t n_iterations, std::size_t eval_every);

struct ExperimentResult {
  Population population;
  SynapseMatrix initial_weights;
  SynapseMatrix final_weights;
  std::vector<IterationLog> logs;
  Metrics metrics;
};

struct ExperimentObserver {
  std::function<void(const Setup&)> on_start;  // before the initial evaluation
  std::function<void(const IterationLog&)> on_iteration;
  // Also called once with iteration 0 for the pre-training evaluation.
  std::function<void(const CurvePoint&)> on_evaluation;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentObserver& observer = {});

// Independent runs, one per seed. Results are in seed-list order and do not
// depend on `jobs`.
struct SweepEntry {
  std::uint64_t seed = 0;
  std::optional<ExperimentResult> result;
  std::string error;
};

std::vector<SweepEntry> run_sweep(const ExperimentConfig& base, const std::vector<std::uint64_t>& seeds,
                                  std::size_t jobs,
                                  const std::function<void(const SweepEntry&)>& on_done = {});

struct SweepRow {
  std::size_t iteration = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  std::size_t n_seeds = 0;
};

// Per-evaluation-point median and quartiles of the catch fraction across all
// successful runs. Throws ParameterError when runs disagree on their curves'
// iterations.
std::vector<SweepRow> aggregate_catch_curves(const std::vector<SweepEntry>& entries);

}  // namespace neuropong
