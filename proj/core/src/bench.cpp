#include "neuropong/bench.hpp"

#include <algorithm>
#include <chrono>
#include <istream>
#include <ostream>
#include <sstream>

#if defined(__linux__)
#include <pthread.h>
#include <sched.h>
#endif

#include "neuropong/error.hpp"
#include "neuropong/io.hpp"
#include "neuropong/stats.hpp"

namespace neuropong::bench {

using Clock = std::chrono::steady_clock;

std::string mode_name(Mode mode) {
  return mode == Mode::kNoPlasticity ? "no-plasticity" : "with-plasticity";
}

Mode parse_mode(const std::string& name) {
  if (name == "no-plasticity") return Mode::kNoPlasticity;
  if (name == "with-plasticity") return Mode::kWithPlasticity;
  throw ConfigError("unknown bench mode '" + name + "' (expected no-plasticity or with-plasticity)");
}

std::vector<Size> parse_sizes(const std::string& text) {
  std::vector<Size> sizes;
  std::istringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto x = item.find('x');
    std::size_t consumed_in = 0, consumed_out = 0;
    Size s;
    try {
      if (x == std::string::npos) throw std::invalid_argument("no separator");
      const std::string a = item.substr(0, x), b = item.substr(x + 1);
      if (a.empty() || b.empty() || a[0] == '-' || b[0] == '-') throw std::invalid_argument("sign");
      s.n_input = std::stoul(a, &consumed_in);
      s.n_output = std::stoul(b, &consumed_out);
      if (consumed_in != a.size() || consumed_out != b.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("malformed bench size '" + item + "' (expected <inputs>x<outputs>)");
    }
    if (s.n_input < 2 || s.n_output < 1) {
      throw ConfigError("bench size '" + item + "' needs at least 2 inputs and 1 output");
    }
    sizes.push_back(s);
  }
  if (sizes.empty()) throw ConfigError("bench size list is empty");
  return sizes;
}

void BenchConfig::validate() const {
  if (n_iterations == 0) throw ConfigError("bench.iterations must be > 0");
  if (warmup >= n_iterations) throw ConfigError("bench.warmup must be smaller than bench.iterations");
  if (sizes.empty()) throw ConfigError("bench.sizes must not be empty");
  if (modes.empty()) throw ConfigError("bench.modes must not be empty");
  for (const auto& s : sizes) {
    if (s.n_input < 2 || s.n_output < 1) throw ConfigError("bench size needs at least 2 inputs and 1 output");
  }
  experiment.validate();
}

double timer_resolution() {
  auto best = Clock::duration::max();
  for (int k = 0; k < 200; ++k) {
    const auto t0 = Clock::now();
    auto t1 = Clock::now();
    while (t1 == t0) t1 = Clock::now();
    best = std::min(best, t1 - t0);
  }
  return std::chrono::duration<double>(best).count();
}

namespace {

bool pin_to_current_cpu() {
#if defined(__linux__)
  const int cpu = sched_getcpu();
  if (cpu < 0) return false;
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu, &set);
  return pthread_setaffinity_np(pthread_self(), sizeof(set), &set) == 0;
#else
  return false;
#endif
}

// Closed-loop state of one (mode, size) cell.
struct Cell {
  Mode mode;
  Size size;
  Population population;
  SynapseMatrix weights;
  RewardBaseline baseline;
  Rng tie_rng;
  std::vector<double> times;
};

void iterate(Cell& c, std::size_t state, std::uint64_t input_seed, std::uint64_t noise_seed,
             const ExperimentConfig& cfg) {
  const SpikeTrain input = poisson_encode(state, c.size.n_input, cfg.sim.rate_hi_hz,
                                          cfg.sim.rate_lo_hz, cfg.sim.trial_duration_ms, input_seed);
  const TrialResult trial = run_trial(c.weights, c.population, input, cfg.sim, cfg.noise, noise_seed);
  const auto rates = firing_rates(trial.output, c.size.n_output, cfg.sim.trial_duration_ms);
  const std::size_t action = argmax_random_tie(rates, c.tie_rng);
  const double reward = compute_reward(state, action, cfg.reward);
  if (c.mode == Mode::kNoPlasticity) return;

  const double used = c.baseline.value(state);
  c.baseline = update_baseline(c.baseline, reward, state, cfg.rstdp);
  const EligibilityMatrix e = digitize(accumulate_traces(
      trial.input_echo, trial.output, cfg.kernel, c.size.n_input, c.size.n_output, cfg.traces));
  c.weights = rstdp_update(c.weights, e, reward, used, cfg.rstdp, &c.tie_rng);
}

Entry summarize_times(Mode mode, Size size, const std::vector<double>& times) {
  Entry e;
  e.mode = mode;
  e.size = size;
  e.median_s = stats::quantile(times, 0.5);
  e.p10_s = stats::quantile(times, 0.1);
  e.p90_s = stats::quantile(times, 0.9);
  e.n_samples = times.size();
  return e;
}

}  // namespace

Report run_bench(const BenchConfig& cfg) {
  cfg.validate();
  Report report;
  report.timer_resolution_s = timer_resolution();
  if (cfg.pin_thread) {
    report.pinned = pin_to_current_cpu();
    if (!report.pinned) report.warnings.push_back("could not pin the measuring thread to one CPU");
  }

  const ExperimentConfig& ex = cfg.experiment;
  for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
    const Size size = cfg.sizes[si];
    const auto params = apply_fixed_pattern_noise(ex.neuron, size.n_output, ex.noise.fixed_pattern_sigma,
                                                  derive_seed(cfg.seed, streams::kFixedPattern, si));
    const Population population = Population::from_params(ex.neuron, params);

    SynapseMatrix w(size.n_input, size.n_output, ex.weights.w_min, ex.weights.w_max, ex.weights.levels);
    Rng init(derive_seed(cfg.seed, streams::kWeightInit, si));
    std::uniform_real_distribution<double> draw(
        ex.weights.w_min, ex.weights.w_min + ex.weights.fraction * (ex.weights.w_max - ex.weights.w_min));
    for (std::size_t i = 0; i < size.n_input; ++i)
      for (std::size_t j = 0; j < size.n_output; ++j) w.set(i, j, draw(init));

    std::vector<Cell> cells;
    for (Mode m : cfg.modes) {
      cells.push_back(Cell{m, size, population, w,
                           RewardBaseline::make(ex.rstdp.baseline_mode, size.n_input, ex.initial_baseline),
                           Rng(derive_seed(cfg.seed, streams::kTieBreak, si)), {}});
      cells.back().times.reserve(cfg.n_iterations - cfg.warmup);
    }

    Rng schedule(derive_seed(cfg.seed, streams::kSchedule, si));
    std::uniform_int_distribution<std::size_t> pick(0, size.n_input - 1);
    for (std::size_t it = 0; it < cfg.n_iterations; ++it) {
      const std::size_t state = pick(schedule);
      const std::uint64_t input_seed = derive_seed(cfg.seed, streams::kBench, si, 2 * it);
      const std::uint64_t noise_seed = derive_seed(cfg.seed, streams::kBench, si, 2 * it + 1);
      for (Cell& c : cells) {
        const auto t0 = Clock::now();
        iterate(c, state, input_seed, noise_seed, ex);
        const auto t1 = Clock::now();
        if (it >= cfg.warmup) c.times.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
    }

    for (const Cell& c : cells) {
      for (std::size_t k = 0; k < c.times.size(); ++k)
        report.samples.push_back({c.mode, c.size, k, c.times[k]});
      report.entries.push_back(summarize_times(c.mode, c.size, c.times));
      const Entry& e = report.entries.back();
      if (report.timer_resolution_s * 100.0 > e.median_s) {
        report.warnings.push_back("timer resolution " + io::format_double(report.timer_resolution_s) +
                                  " s is coarse relative to the " + mode_name(c.mode) + " median " +
                                  io::format_double(e.median_s) + " s at " + std::to_string(size.n_input) +
                                  "x" + std::to_string(size.n_output));
      }
    }
  }
  return report;
}

std::vector<Entry> summarize(const std::vector<Sample>& samples) {
  struct Group {
    Mode mode;
    Size size;
    std::vector<double> times;
  };
  std::vector<Group> groups;
  for (const auto& s : samples) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.mode == s.mode && g.size == s.size; });
    if (it == groups.end()) {
      groups.push_back({s.mode, s.size, {}});
      it = std::prev(groups.end());
    }
    it->times.push_back(s.seconds);
  }
  std::vector<Entry> out;
  for (const auto& g : groups) out.push_back(summarize_times(g.mode, g.size, g.times));
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<Entry>& entries) {
  out << kSummaryCsvHeader << '\n';
  for (const auto& e : entries) {
    out << mode_name(e.mode) << ',' << e.size.n_input << ',' << e.size.n_output << ','
        << io::format_double(e.median_s) << ',' << io::format_double(e.p10_s) << ','
        << io::format_double(e.p90_s) << ',' << e.n_samples << '\n';
  }
}

void write_samples_csv(std::ostream& out, const std::vector<Sample>& samples) {
  out << kSamplesCsvHeader << '\n';
  for (const auto& s : samples) {
    out << mode_name(s.mode) << ',' << s.size.n_input << ',' << s.size.n_output << ',' << s.iteration
        << ',' << io::format_double(s.seconds) << '\n';
  }
}

std::vector<Sample> read_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSamplesCsvHeader) {
    throw FormatError("bench sample file header does not match");
  }
  std::vector<Sample> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string mode, a, b, k, t;
    if (!std::getline(ss, mode, ',') || !std::getline(ss, a, ',') || !std::getline(ss, b, ',') ||
        !std::getline(ss, k, ',') || !std::getline(ss, t)) {
      throw FormatError("bench sample row " + std::to_string(samples.size() + 1) + " is malformed");
    }
    try {
      Sample s;
      s.mode = parse_mode(mode);
      s.size = {std::stoul(a), std::stoul(b)};
      s.iteration = std::stoul(k);
      s.seconds = std::stod(t);
      samples.push_back(s);
    } catch (const std::exception&) {
      throw FormatError("bench sample row " + std::to_string(samples.size() + 1) + " is malformed");
    }
  }
  return samples;
}

}  // namespace neuropong::bench
