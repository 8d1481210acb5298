#include "neuropong/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "neuropong/error.hpp"
#include "neuropong/stats.hpp"

namespace neuropong {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

std::uint64_t fixed_pattern_seed(const ExperimentConfig& cfg) {
  return cfg.fixed_pattern_seed.value_or(derive_seed(cfg.seed, streams::kFixedPattern));
}

}  // namespace

void ExperimentConfig::validate() const {
  require(n_iterations > 0, "experiment.iterations must be > 0");
  require(eval_every > 0, "experiment.eval_every must be > 0");
  require(eval_repeats > 0, "experiment.eval_repeats must be > 0");
  require(permutation_shuffles > 0, "experiment.permutation_shuffles must be > 0");
  try {
    neuron.validate();
    kernel.validate();
    traces.validate();
    rstdp.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  check_stability(neuron, sim.dt_ms);
  sim.validate();
  env.validate();
  reward.validate();
  require(noise.fixed_pattern_sigma >= 0.0, "noise.fixed_pattern_sigma must be >= 0");
  require(noise.trial_noise_current_sigma >= 0.0, "noise.trial_noise_current_sigma must be >= 0");
  require(weights.fraction > 0.0 && weights.fraction <= 1.0, "weights.init_fraction must lie in (0, 1]");
  require(weights.w_max > weights.w_min, "weights.w_max must exceed weights.w_min");
  require(weights.levels != 1, "weights.levels must be 0 (continuous) or >= 2");
  require(initial_baseline >= 0.0 && initial_baseline <= 1.0,
          "plasticity.initial_baseline must lie in [0, 1]");
}

Setup make_setup(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_units();
  Setup setup;
  setup.population = Population::from_params(
      cfg.neuron, apply_fixed_pattern_noise(cfg.neuron, n, cfg.noise.fixed_pattern_sigma,
                                            fixed_pattern_seed(cfg)));
  for (const auto& p : setup.population.params) check_stability(p, cfg.sim.dt_ms);

  const WeightInit& wi = cfg.weights;
  SynapseMatrix w(n, n, wi.w_min, wi.w_max, wi.levels);
  Rng rng(derive_seed(cfg.seed, streams::kWeightInit));
  if (w.continuous()) {
    std::uniform_real_distribution<double> draw(wi.w_min, wi.w_min + wi.fraction * (wi.w_max - wi.w_min));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w.set(i, j, draw(rng));
  } else {
    const auto top = static_cast<std::int64_t>(
        std::floor(wi.fraction * static_cast<double>(wi.levels - 1) + 1e-9));
    std::uniform_int_distribution<std::int64_t> draw(0, top);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w.set_raw(i, j, w.value_of_level(draw(rng)));
  }
  setup.initial_weights = std::move(w);
  return setup;
}

std::size_t argmax_random_tie(const std::vector<double>& values, Rng& rng) {
  if (values.empty()) throw ParameterError("argmax of an empty vector");
  const double best = *std::max_element(values.begin(), values.end());
  std::vector<std::size_t> ties;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (values[k] == best) ties.push_back(k);
  if (ties.size() == 1) return ties.front();
  std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
  return ties[pick(rng)];
}

IterationLog run_iteration(LoopState& loop, const Population& population, std::size_t state,
                           std::size_t iteration, const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = cfg.n_units();
  if (state >= n) throw ParameterError("presented state out of range");

  const SpikeTrain input =
      poisson_encode(state, n, cfg.sim.rate_hi_hz, cfg.sim.rate_lo_hz, cfg.sim.trial_duration_ms,
                     derive_seed(cfg.seed, streams::kInputSpikes, iteration));
  const std::uint64_t noise_seed = derive_seed(cfg.seed, streams::kTrialNoise, iteration, cfg.noise.seed);
  const TrialResult trial = run_trial(loop.weights, population, input, cfg.sim, cfg.noise, noise_seed);

  IterationLog log;
  log.iteration = iteration;
  log.state = state;
  log.rates_hz = firing_rates(trial.output, n, cfg.sim.trial_duration_ms);
  log.action = argmax_random_tie(log.rates_hz, loop.rng);
  log.reward = compute_reward(state, log.action, cfg.reward);
  log.baseline = loop.baseline.value(state);
  loop.baseline = update_baseline(loop.baseline, log.reward, state, cfg.rstdp);

  const EligibilityMatrix traces = digitize(accumulate_traces(
      trial.input_echo, trial.output, cfg.kernel, n, n, cfg.traces));
  SynapseMatrix updated =
      rstdp_update(loop.weights, traces, log.reward, log.baseline, cfg.rstdp, &loop.rng);
  double sq = 0.0;
  for (std::size_t k = 0; k < updated.size(); ++k) {
    const double d = updated.values()[k] - loop.weights.values()[k];
    sq += d * d;
  }
  log.weight_delta_norm = std::sqrt(sq);
  loop.weights = std::move(updated);

  if (cfg.record_wall_time) {
    log.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return log;
}

std::vector<std::vector<double>> evaluation_rates(const SynapseMatrix& weights,
                                                  const Population& population,
                                                  const ExperimentConfig& cfg) {
  const std::size_t n = cfg.n_units();
  NoiseConfig quiet = cfg.noise;
  quiet.trial_noise_current_sigma = 0.0;
  std::vector<std::vector<double>> out(n, std::vector<double>(population.size(), 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t r = 0; r < cfg.eval_repeats; ++r) {
      const SpikeTrain input =
          poisson_encode(s, n, cfg.sim.rate_hi_hz, cfg.sim.rate_lo_hz, cfg.sim.trial_duration_ms,
                         derive_seed(cfg.seed, streams::kEvalInput, s, r));
      const TrialResult trial = run_trial(weights, population, input, cfg.sim, quiet, 0);
      const auto rates = firing_rates(trial.output, population.size(), cfg.sim.trial_duration_ms);
      for (std::size_t j = 0; j < rates.size(); ++j) out[s][j] += rates[j];
    }
    for (auto& v : out[s]) v /= static_cast<double>(cfg.eval_repeats);
  }
  return out;
}

Policy greedy_policy(const SynapseMatrix& weights, const Population& population,
                     const ExperimentConfig& cfg, std::uint64_t tie_seed) {
  const auto rates = evaluation_rates(weights, population, cfg);
  Rng rng(tie_seed);
  Policy policy(rates.size());
  for (std::size_t s = 0; s < rates.size(); ++s) policy[s] = argmax_random_tie(rates[s], rng);
  return policy;
}

Policy evaluation_policy(const SynapseMatrix& weights, const Population& population,
                         const ExperimentConfig& cfg) {
  return greedy_policy(weights, population, cfg, derive_seed(cfg.seed, streams::kEvalTieBreak));
}

double diagonal_dominance(const SynapseMatrix& weights) {
  if (weights.rows() != weights.cols()) throw ParameterError("diagonal dominance needs a square matrix");
  std::size_t dominant = 0;
  for (std::size_t i = 0; i < weights.rows(); ++i) {
    const auto row = weights.row(i);
    bool strict = true;
    for (std::size_t j = 0; j < row.size() && strict; ++j)
      if (j != i && row[j] >= row[i]) strict = false;
    dominant += strict ? 1 : 0;
  }
  return static_cast<double>(dominant) / static_cast<double>(weights.rows());
}

namespace {

std::pair<std::vector<double>, std::vector<double>> excitability_pairs(
    const SynapseMatrix& weights, const Population& population) {
  if (weights.rows() != weights.cols() || weights.cols() != population.size()) {
    throw ParameterError("weight matrix and population shapes disagree");
  }
  std::vector<double> gap(population.size()), diag(population.size());
  for (std::size_t j = 0; j < population.size(); ++j) {
    gap[j] = population.params[j].v_thresh_mv - population.params[j].v_rest_mv;
    diag[j] = weights(j, j);
  }
  return {gap, diag};
}

}  // namespace

double weight_excitability_correlation(const SynapseMatrix& weights, const Population& population) {
  const auto [gap, diag] = excitability_pairs(weights, population);
  return stats::spearman(gap, diag);
}

CorrelationResult weight_excitability_test(const SynapseMatrix& weights,
                                           const Population& population, int n_shuffles,
                                           std::uint64_t seed) {
  const auto [gap, diag] = excitability_pairs(weights, population);
  const auto perm = stats::spearman_permutation_test(gap, diag, n_shuffles, seed);
  return {perm.statistic, perm.p_value};
}

std::vector<std::size_t> evaluation_points(std::size_t n_iterations, std::size_t eval_every) {
  if (eval_every == 0) throw ParameterError("eval_every must be > 0");
  std::vector<std::size_t> points;
  for (std::size_t k = eval_every; k <= n_iterations; k += eval_every) points.push_back(k);
  if (points.empty() || points.back() != n_iterations) points.push_back(n_iterations);
  return points;
}

std::vector<CurvePoint> mean_reward_curve(const std::vector<IterationLog>& logs,
                                          std::size_t eval_every) {
  std::vector<CurvePoint> curve;
  if (logs.empty()) return curve;
  std::size_t begin = 0;
  for (std::size_t end : evaluation_points(logs.size(), eval_every)) {
    double sum = 0.0;
    for (std::size_t k = begin; k < end; ++k) sum += logs[k].reward;
    curve.push_back({end, sum / static_cast<double>(end - begin)});
    begin = end;
  }
  return curve;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentObserver& observer) {
  Setup setup = make_setup(cfg);
  const std::size_t n = cfg.n_units();

  ExperimentResult result;
  result.population = setup.population;
  result.initial_weights = setup.initial_weights;

  LoopState loop{setup.initial_weights,
                 RewardBaseline::make(cfg.rstdp.baseline_mode, n, cfg.initial_baseline),
                 Rng(derive_seed(cfg.seed, streams::kTieBreak))};

  auto evaluate = [&] {
    return evaluate_catch_fraction(evaluation_policy(loop.weights, setup.population, cfg), cfg.env);
  };

  if (observer.on_start) observer.on_start(setup);
  result.metrics.initial_catch_fraction = evaluate();
  if (observer.on_evaluation) observer.on_evaluation({0, result.metrics.initial_catch_fraction});

  Rng schedule(derive_seed(cfg.seed, streams::kSchedule));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const auto points = evaluation_points(cfg.n_iterations, cfg.eval_every);
  std::size_t next_point = 0;

  result.logs.reserve(cfg.n_iterations);
  for (std::size_t it = 0; it < cfg.n_iterations; ++it) {
    const std::size_t state = cfg.schedule == StateSchedule::kCyclic ? it % n : pick(schedule);
    result.logs.push_back(run_iteration(loop, setup.population, state, it, cfg));
    if (observer.on_iteration) observer.on_iteration(result.logs.back());
    if (it + 1 == points[next_point]) {
      const CurvePoint p{it + 1, evaluate()};
      result.metrics.catch_fraction_curve.push_back(p);
      if (observer.on_evaluation) observer.on_evaluation(p);
      ++next_point;
    }
  }

  result.final_weights = loop.weights;
  result.metrics.mean_reward_curve = mean_reward_curve(result.logs, cfg.eval_every);
  result.metrics.diagonal_dominance = diagonal_dominance(result.final_weights);
  try {
    result.metrics.weight_excitability =
        weight_excitability_test(result.final_weights, result.population,
                                 cfg.permutation_shuffles,
                                 derive_seed(cfg.seed, streams::kPermutation));
  } catch (const UndefinedCorrelationError&) {
    result.metrics.weight_excitability.reset();
  }
  return result;
}

std::vector<SweepEntry> run_sweep(const ExperimentConfig& base,
                                  const std::vector<std::uint64_t>& seeds, std::size_t jobs,
                                  const std::function<void(const SweepEntry&)>& on_done) {
  if (seeds.empty()) throw ParameterError("sweep needs at least one seed");
  std::vector<SweepEntry> entries(seeds.size());
  std::mutex done_mutex;
  std::size_t next = 0;
  std::mutex next_mutex;

  auto worker = [&] {
    for (;;) {
      std::size_t k;
      {
        std::lock_guard lock(next_mutex);
        if (next >= seeds.size()) return;
        k = next++;
      }
      SweepEntry entry;
      entry.seed = seeds[k];
      try {
        ExperimentConfig cfg = base;
        cfg.seed = seeds[k];
        entry.result = run_experiment(cfg);
      } catch (const std::exception& e) {
        entry.error = e.what();
      }
      entries[k] = std::move(entry);
      if (on_done) {
        std::lock_guard lock(done_mutex);
        on_done(entries[k]);
      }
    }
  };

  const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, seeds.size());
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  return entries;
}

std::vector<SweepRow> aggregate_catch_curves(const std::vector<SweepEntry>& entries) {
  std::vector<const ExperimentResult*> ok;
  for (const auto& e : entries)
    if (e.result) ok.push_back(&*e.result);
  if (ok.empty()) return {};
  const auto& ref = ok.front()->metrics.catch_fraction_curve;
  std::vector<SweepRow> rows;
  for (std::size_t p = 0; p < ref.size(); ++p) {
    std::vector<double> values;
    for (const auto* r : ok) {
      const auto& curve = r->metrics.catch_fraction_curve;
      if (curve.size() != ref.size() || curve[p].iteration != ref[p].iteration) {
        throw ParameterError("sweep runs disagree on evaluation iterations");
      }
      values.push_back(curve[p].value);
    }
    rows.push_back({ref[p].iteration, stats::median(values), stats::quantile(values, 0.25),
                    stats::quantile(values, 0.75), values.size()});
  }
  return rows;
}

}  // namespace neuropong
