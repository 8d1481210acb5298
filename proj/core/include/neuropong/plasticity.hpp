#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "neuropong/random.hpp"
#include "neuropong/snn.hpp"
#include "neuropong/synapse_matrix.hpp"

namespace neuropong {

struct StdpKernel {
  double a_plus = 1.0;
  double a_minus = 1.0;
  double tau_plus_ms = 20.0;
  double tau_minus_ms = 20.0;

  void validate() const;
};

// Analog trace storage: values saturate at +/-saturation and are read out by
// an ADC with `adc_levels` uniformly spaced codes spanning the full range.
struct TraceConfig {
  double saturation = 16.0;
  std::size_t adc_levels = 255;

  void validate() const;  friend bool operator==(const TraceConfig&, const TraceConfig&) = default;
};

class EligibilityMatrix {
 public:
  EligibilityMatrix() = default;
  EligibilityMatrix(std::size_t n_input, std::size_t n_output, TraceConfig storage = {});

  std::size_t rows() const noexcept { return n_input_; }
  std::size_t cols() const noexcept { return n_output_; }
  double saturation() const noexcept { return storage_.saturation; }
  std::size_t adc_levels() const noexcept { return storage_.adc_levels; }
  const TraceConfig& storage() const noexcept { return storage_; }
  double adc_step() const noexcept;

  double operator()(std::size_t i, std::size_t j) const noexcept { return e_[i * n_output_ + j]; }
  // Stores value clamped to +/-saturation.
  void set(std::size_t i, std::size_t j, double value) noexcept;
  std::span<const double> values() const noexcept { return e_; }

  friend bool operator==(const EligibilityMatrix&, const EligibilityMatrix&) = default;

 private:
  std::size_t n_input_ = 0;
  std::size_t n_output_ = 0;
  TraceConfig storage_;
  std::vector<double> e_;
};

enum class BaselineMode { kGlobal, kPerState };

struct RstdpConfig {
  // Weight units per unit of (R - R_bar) * e. With the default 64-level
  // [0, 63] weight range this is 8 levels.
  double eta = 8.0;
  double baseline_gamma = 0.2;
  BaselineMode baseline_mode = BaselineMode::kPerState;
  bool stochastic_rounding = false;

  void validate() const;
};

// Running reward average; one entry in global mode, one per state otherwise.
struct RewardBaseline {
  BaselineMode mode = BaselineMode::kPerState;
  std::vector<double> values;

  static RewardBaseline make(BaselineMode mode, std::size_t n_states, double initial = 0.0);
  double value(std::size_t state) const;
  friend bool operator==(const RewardBaseline&, const RewardBaseline&) = default;
};

// All-pairs STDP sum per synapse, computed online by sweeping the merged
// spike sequence with exponentially decaying pre/post accumulators. Spikes at
// identical times do not pair. The result is clamped to +/-saturation.
EligibilityMatrix accumulate_traces(const SpikeTrain& pre, const SpikeTrain& post,
                                    const StdpKernel& kernel, std::size_t n_input,
                                    std::size_t n_output, const TraceConfig& storage = {});

// Rounds each trace to the nearest ADC code. Idempotent.
EligibilityMatrix digitize(const EligibilityMatrix& e);
double digitize_value(double value, const TraceConfig& storage) noexcept;

// eta * (R - R_bar) * e per synapse, before clipping and quantization.
std::vector<double> weight_deltas(const EligibilityMatrix& e, double reward, double baseline,
                                  const RstdpConfig& cfg);

// w' = quantize(clip(w + eta * (R - R_bar) * e)). `rng` is only consulted
// when cfg.stochastic_rounding is set on a quantized matrix.
SynapseMatrix rstdp_update(const SynapseMatrix& w, const EligibilityMatrix& e, double reward,
                           double baseline, const RstdpConfig& cfg, Rng* rng = nullptr);

// EMA step R_bar <- (1 - gamma) R_bar + gamma R on the global entry or on
// entry `state`.
RewardBaseline update_baseline(const RewardBaseline& baseline, double reward, std::size_t state,
                               const RstdpConfig& cfg);

}  // namespace neuropong
