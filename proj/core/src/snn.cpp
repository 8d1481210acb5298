#include "neuropong/snn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "neuropong/error.hpp"
#include "neuropong/random.hpp"

namespace neuropong {

namespace {

struct Decay {
  double membrane;
  double synapse;
};

Decay decay_factors(const NeuronParams& p, double dt) {
  return {std::exp(-dt / p.tau_m_ms), std::exp(-dt / p.tau_syn_ms)};
}

// Shared by lif_step and run_trial so both paths are bitwise identical.
inline bool advance(NeuronState& s, const NeuronParams& p, const Decay& d, double drive,
                    double dt) noexcept {
  if (s.refrac_remaining_ms > 0.0) {
    s.v_mv = p.v_reset_mv;
    s.i_syn *= d.synapse;
    s.refrac_remaining_ms -= dt;
    // Snap float residue so a refractory period of k*dt lasts exactly k steps.
    if (s.refrac_remaining_ms < 0.5 * dt) s.refrac_remaining_ms = 0.0;
    return false;
  }
  const double v_inf = p.v_rest_mv + s.i_syn + drive;
  s.v_mv = v_inf + (s.v_mv - v_inf) * d.membrane;
  s.i_syn *= d.synapse;
  if (s.v_mv >= p.v_thresh_mv) {
    s.v_mv = p.v_reset_mv;
    s.refrac_remaining_ms = p.tau_refrac_ms;
    return true;
  }
  return false;
}

}  // namespace

bool NeuronParams::valid() const noexcept {
  return tau_m_ms > 0.0 && tau_syn_ms > 0.0 && tau_refrac_ms >= 0.0 &&
         v_reset_mv <= v_rest_mv && v_rest_mv < v_thresh_mv && std::isfinite(tau_m_ms) &&
         std::isfinite(tau_syn_ms) && std::isfinite(tau_refrac_ms) &&
         std::isfinite(v_thresh_mv) && std::isfinite(v_reset_mv);
}

void NeuronParams::validate() const {
  if (!(tau_m_ms > 0.0)) throw ParameterError("neuron tau_m must be > 0");
  if (!(tau_syn_ms > 0.0)) throw ParameterError("neuron tau_syn must be > 0");
  if (!(tau_refrac_ms >= 0.0)) throw ParameterError("neuron tau_refrac must be >= 0");
  if (!(v_reset_mv <= v_rest_mv)) throw ParameterError("neuron needs v_reset <= v_rest");
  if (!(v_rest_mv < v_thresh_mv)) throw ParameterError("neuron needs v_rest < v_thresh");
  if (!valid()) throw ParameterError("neuron parameters must be finite");
}

Population Population::uniform(const NeuronParams& nominal, std::size_t n) {
  return from_params(nominal, std::vector<NeuronParams>(n, nominal));
}

Population Population::from_params(const NeuronParams& nominal, std::vector<NeuronParams> params) {
  Population pop;
  pop.nominal = nominal;
  pop.params = std::move(params);
  pop.states.resize(pop.params.size());
  pop.reset();
  return pop;
}

void Population::reset() noexcept {
  states.resize(params.size());
  for (std::size_t j = 0; j < params.size(); ++j) states[j] = NeuronState::at_rest(params[j]);
}

void Population::validate() const {
  if (params.size() != states.size()) throw ParameterError("population params/states length mismatch");
  if (params.empty()) throw ParameterError("population is empty");
  for (const auto& p : params) p.validate();
}

bool SpikeTrain::time_sorted() const noexcept {
  return std::is_sorted(events.begin(), events.end(),
                        [](const SpikeEvent& a, const SpikeEvent& b) { return a.time_ms < b.time_ms; });
}

bool SpikeTrain::well_formed() const noexcept {
  if (!time_sorted()) return false;
  return std::all_of(events.begin(), events.end(), [&](const SpikeEvent& e) {
    return e.time_ms >= 0.0 && e.time_ms <= duration_ms && e.unit < n_units;
  });
}

std::vector<std::size_t> SpikeTrain::counts() const {
  std::vector<std::size_t> out(n_units, 0);
  for (const auto& e : events) {
    if (e.unit >= n_units) throw ParameterError("spike unit index out of range");
    ++out[e.unit];
  }
  return out;
}

void SimConfig::validate() const {
  if (!(dt_ms > 0.0)) throw ConfigError("snn.dt_ms must be > 0");
  if (!(trial_duration_ms > 0.0)) throw ConfigError("snn.trial_duration_ms must be > 0");
  if (!(rate_lo_hz >= 0.0)) throw ConfigError("snn.rate_lo_hz must be >= 0");
  if (!(rate_hi_hz > rate_lo_hz)) throw ConfigError("snn.rate_hi_hz must exceed snn.rate_lo_hz");
  if (!(weight_scale >= 0.0)) throw ConfigError("snn.weight_scale must be >= 0");
}

void check_stability(const NeuronParams& params, double dt_ms) {
  if (!(dt_ms > 0.0)) throw ConfigError("time step must be > 0");
  const double limit = std::min(params.tau_m_ms, params.tau_syn_ms) / 5.0;
  if (dt_ms > limit) {
    std::ostringstream msg;
    msg << "time step " << dt_ms << " ms exceeds stability bound min(tau_m, tau_syn)/5 = "
        << limit << " ms";
    throw ConfigError(msg.str());
  }
}

SpikeTrain poisson_encode(std::size_t active_unit, std::size_t n_units, double rate_hi_hz,
                          double rate_lo_hz, double duration_ms, std::uint64_t rng_seed) {
  if (n_units == 0 || active_unit >= n_units) throw ParameterError("active unit index out of range");
  if (!(rate_lo_hz >= 0.0)) throw ParameterError("rate_lo must be >= 0");
  if (!(rate_hi_hz > rate_lo_hz)) throw ParameterError("rate_hi must exceed rate_lo");
  if (!(duration_ms > 0.0)) throw ParameterError("duration must be > 0");

  SpikeTrain train;
  train.n_units = n_units;
  train.duration_ms = duration_ms;
  Rng rng(rng_seed);
  for (std::size_t unit = 0; unit < n_units; ++unit) {
    const double rate = unit == active_unit ? rate_hi_hz : rate_lo_hz;
    if (rate <= 0.0) continue;
    std::exponential_distribution<double> isi(rate / 1000.0);  // per ms
    for (double t = isi(rng); t < duration_ms; t += isi(rng)) train.events.push_back({t, unit});
  }
  std::sort(train.events.begin(), train.events.end());
  return train;
}

LifStep lif_step(const NeuronState& state, const NeuronParams& params, double input_current,
                 double noise_current, double dt_ms) {
  check_stability(params, dt_ms);
  LifStep out{state, false};
  out.spiked = advance(out.state, params, decay_factors(params, dt_ms),
                       input_current + noise_current, dt_ms);
  return out;
}

TrialResult run_trial(const SynapseMatrix& weights, const Population& population,
                      const SpikeTrain& input, const SimConfig& sim, const NoiseConfig& noise,
                      std::uint64_t rng_seed) {
  population.validate();
  sim.validate();
  const std::size_t n_out = population.size();
  if (weights.cols() != n_out || weights.rows() != input.n_units) {
    std::ostringstream msg;
    msg << "weight shape " << weights.rows() << "x" << weights.cols() << " does not match "
        << input.n_units << " inputs x " << n_out << " neurons";
    throw ParameterError(msg.str());
  }
  if (!input.time_sorted()) throw ParameterError("input spike train is not time-sorted");
  if (!(noise.trial_noise_current_sigma >= 0.0)) throw ParameterError("trial noise sigma must be >= 0");

  const double dt = sim.dt_ms;
  const double duration = sim.trial_duration_ms;
  std::vector<Decay> decay(n_out);
  for (std::size_t j = 0; j < n_out; ++j) {
    check_stability(population.params[j], dt);
    decay[j] = decay_factors(population.params[j], dt);
  }

  std::vector<NeuronState> states(n_out);
  for (std::size_t j = 0; j < n_out; ++j) states[j] = NeuronState::at_rest(population.params[j]);

  const auto n_steps = static_cast<std::size_t>(std::llround(duration / dt));
  TrialResult result;
  result.input_echo = input;
  result.output.n_units = n_out;
  result.output.duration_ms = duration;

  const bool noisy = noise.trial_noise_current_sigma > 0.0;
  Rng rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, noisy ? noise.trial_noise_current_sigma : 1.0);

  std::size_t next_input = 0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double step_end = static_cast<double>(k + 1) * dt;
    while (next_input < input.events.size() && input.events[next_input].time_ms < step_end) {
      const SpikeEvent& ev = input.events[next_input++];
      const auto row = weights.row(ev.unit);
      for (std::size_t j = 0; j < n_out; ++j) states[j].i_syn += row[j] * sim.weight_scale;
    }
    for (std::size_t j = 0; j < n_out; ++j) {
      const double drive = noisy ? gauss(rng) : 0.0;
      if (advance(states[j], population.params[j], decay[j], drive, dt)) {
        result.output.events.push_back({step_end, j});
      }
    }
  }
  return result;
}

std::vector<double> firing_rates(const SpikeTrain& output, std::size_t n_neurons,
                                 double duration_ms) {
  if (!(duration_ms > 0.0)) throw ParameterError("duration must be > 0");
  std::vector<double> rates(n_neurons, 0.0);
  for (const auto& e : output.events) {
    if (e.unit >= n_neurons) throw ParameterError("spike unit index out of range");
    rates[e.unit] += 1.0;
  }
  const double seconds = duration_ms / 1000.0;
  for (auto& r : rates) r /= seconds;
  return rates;
}

std::vector<NeuronParams> apply_fixed_pattern_noise(const NeuronParams& nominal, std::size_t n,
                                                    double sigma, std::uint64_t seed) {
  nominal.validate();
  if (!(sigma >= 0.0)) throw ParameterError("fixed-pattern sigma must be >= 0");
  std::vector<NeuronParams> out(n, nominal);
  if (sigma == 0.0) return out;

  Rng rng(seed);
  std::normal_distribution<double> eps(0.0, sigma);
  for (auto& p : out) {
    do {
      p.v_thresh_mv = nominal.v_thresh_mv * (1.0 + eps(rng));
    } while (!p.valid());
    do {
      p.tau_m_ms = nominal.tau_m_ms * (1.0 + eps(rng));
    } while (!p.valid());
  }
  return out;
}

}  // namespace neuropong
