#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "neuropong/synapse_matrix.hpp"

namespace neuropong {

// Leaky integrate-and-fire constants. Currents are expressed in mV: a constant
// current I moves the membrane's fixed point to v_rest + I.
struct NeuronParams {
  double tau_m_ms = 10.0;
  double v_rest_mv = -65.0;
  double v_reset_mv = -70.0;
  double v_thresh_mv = -55.0;
  double tau_refrac_ms = 2.0;
  double tau_syn_ms = 5.0;

  bool valid() const noexcept;
  // Throws ParameterError naming the violated invariant.
  void validate() const;
  friend bool operator==(const NeuronParams&, const NeuronParams&) = default;
};

struct NeuronState {
  double v_mv = -65.0;
  double i_syn = 0.0;
  double refrac_remaining_ms = 0.0;

  static NeuronState at_rest(const NeuronParams& p) noexcept { return {p.v_rest_mv, 0.0, 0.0}; }
  friend bool operator==(const NeuronState&, const NeuronState&) = default;
};

struct Population {
  std::vector<NeuronParams> params;
  std::vector<NeuronState> states;
  NeuronParams nominal;

  static Population uniform(const NeuronParams& nominal, std::size_t n);
  static Population from_params(const NeuronParams& nominal, std::vector<NeuronParams> params);
  std::size_t size() const noexcept { return params.size(); }
  void reset() noexcept;
  void validate() const;
};

struct SpikeEvent {
  double time_ms = 0.0;
  std::size_t unit = 0;
  friend auto operator<=>(const SpikeEvent&, const SpikeEvent&) = default;
};

struct SpikeTrain {
  std::vector<SpikeEvent> events;
  std::size_t n_units = 0;
  double duration_ms = 0.0;

  bool time_sorted() const noexcept;
  // Sorted, in [0, duration], unit indices below n_units.
  bool well_formed() const noexcept;
  std::vector<std::size_t> counts() const;
  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;
};

struct NoiseConfig {
  double fixed_pattern_sigma = 0.0;
  double trial_noise_current_sigma = 40.0;
  // Selects an independent trial-noise stream without touching input spikes
  // or the state schedule.
  std::uint64_t seed = 0;
};

// Per-trial simulation settings shared by training, evaluation and benchmarks.
struct SimConfig {
  double dt_ms = 0.1;
  double trial_duration_ms = 50.0;
  double rate_hi_hz = 70.0;
  double rate_lo_hz = 0.0;
  // mV added to i_syn per input spike per unit weight.
  double weight_scale = 1.75;

  void validate() const;
};

// Throws ConfigError unless 0 < dt <= min(tau_m, tau_syn) / 5.
void check_stability(const NeuronParams& params, double dt_ms);

SpikeTrain poisson_encode(std::size_t active_unit, std::size_t n_units, double rate_hi_hz,
                          double rate_lo_hz, double duration_ms, std::uint64_t rng_seed);

struct LifStep {
  NeuronState state;
  bool spiked = false;
};

// One exponential-Euler step. The total drive (i_syn + input + noise) is held
// constant over the step, the membrane relaxes exactly toward v_rest + drive,
// and i_syn decays exactly with tau_syn.
LifStep lif_step(const NeuronState& state, const NeuronParams& params, double input_current,
                 double noise_current, double dt_ms);

struct TrialResult {
  SpikeTrain output;
  SpikeTrain input_echo;
};

// Simulates every output neuron for the configured trial duration, starting
// from rest. An input spike on unit i at time t is delivered at the start of
// the step containing t and adds weights(i, j) * weight_scale to neuron j's
// i_syn. Output spikes are stamped with the end time of the step in which the
// threshold was crossed.
TrialResult run_trial(const SynapseMatrix& weights, const Population& population,
                      const SpikeTrain& input, const SimConfig& sim, const NoiseConfig& noise,
                      std::uint64_t rng_seed);

std::vector<double> firing_rates(const SpikeTrain& output, std::size_t n_neurons,
                                 double duration_ms);

// Draws v_thresh and tau_m once per neuron as nominal * (1 + eps) with
// eps ~ N(0, sigma), redrawing any draw that would break NeuronParams
// invariants.
std::vector<NeuronParams> apply_fixed_pattern_noise(const NeuronParams& nominal, std::size_t n,
                                                    double sigma, std::uint64_t seed);

}  // namespace neuropong
