#include "neuropong/plasticity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "neuropong/error.hpp"

namespace neuropong {

void StdpKernel::validate() const {
  if (!(tau_plus_ms > 0.0) || !(tau_minus_ms > 0.0)) throw ParameterError("STDP time constants must be > 0");
  if (!(a_plus >= 0.0) || !(a_minus >= 0.0)) throw ParameterError("STDP amplitudes must be >= 0");
}

void TraceConfig::validate() const {
  if (!(saturation > 0.0)) throw ParameterError("trace saturation must be > 0");
  if (adc_levels < 2) throw ParameterError("trace ADC needs at least 2 levels");
}

EligibilityMatrix::EligibilityMatrix(std::size_t n_input, std::size_t n_output, TraceConfig storage)
    : n_input_(n_input), n_output_(n_output), storage_(storage), e_(n_input * n_output, 0.0) {
  storage_.validate();
}

double EligibilityMatrix::adc_step() const noexcept {
  return 2.0 * storage_.saturation / static_cast<double>(storage_.adc_levels - 1);
}

void EligibilityMatrix::set(std::size_t i, std::size_t j, double value) noexcept {
  e_[i * n_output_ + j] = std::clamp(value, -storage_.saturation, storage_.saturation);
}

void RstdpConfig::validate() const {
  if (!(eta >= 0.0)) throw ParameterError("learning rate eta must be >= 0");
  if (!(baseline_gamma > 0.0 && baseline_gamma <= 1.0)) {
    throw ParameterError("baseline gamma must lie in (0, 1]");
  }
}

RewardBaseline RewardBaseline::make(BaselineMode mode, std::size_t n_states, double initial) {
  if (mode == BaselineMode::kPerState && n_states == 0)
    throw ParameterError("per-state baseline needs states");
  return {mode, std::vector<double>(mode == BaselineMode::kGlobal ? 1 : n_states, initial)};
}

double RewardBaseline::value(std::size_t state) const {
  if (mode == BaselineMode::kGlobal) return values.at(0);
  if (state >= values.size()) throw ParameterError("baseline state index out of range");
  return values[state];
}

EligibilityMatrix accumulate_traces(const SpikeTrain& pre, const SpikeTrain& post,
                                    const StdpKernel& kernel, std::size_t n_input,
                                    std::size_t n_output, const TraceConfig& storage) {
  kernel.validate();
  if (!pre.time_sorted() || !post.time_sorted()) throw ParameterError("spike trains must be time-sorted");

  // Raw sums first; saturation applies to the final all-pairs value.
  std::vector<double> sum(n_input * n_output, 0.0);
  std::vector<double> pre_trace(n_input, 0.0), pre_time(n_input, 0.0);
  std::vector<double> post_trace(n_output, 0.0), post_time(n_output, 0.0);
  std::vector<std::size_t> pre_active, post_active;
  std::vector<char> pre_seen(n_input, 0), post_seen(n_output, 0);

  auto pre_at = [&](std::size_t i, double t) {
    return pre_trace[i] * std::exp(-(t - pre_time[i]) / kernel.tau_plus_ms);
  };
  auto post_at = [&](std::size_t j, double t) {
    return post_trace[j] * std::exp(-(t - post_time[j]) / kernel.tau_minus_ms);
  };

  std::size_t a = 0, b = 0;
  std::vector<std::size_t> pre_now, post_now;
  while (a < pre.events.size() || b < post.events.size()) {
    double t = std::numeric_limits<double>::infinity();
    if (a < pre.events.size()) t = pre.events[a].time_ms;
    if (b < post.events.size()) t = std::min(t, post.events[b].time_ms);

    pre_now.clear();
    post_now.clear();
    while (a < pre.events.size() && pre.events[a].time_ms == t) {
      if (pre.events[a].unit >= n_input) throw ParameterError("pre spike unit out of range");
      pre_now.push_back(pre.events[a++].unit);
    }
    while (b < post.events.size() && post.events[b].time_ms == t) {
      if (post.events[b].unit >= n_output) throw ParameterError("post spike unit out of range");
      post_now.push_back(post.events[b++].unit);
    }

    // Pair against strictly earlier spikes only.
    for (std::size_t j : post_now) {
      for (std::size_t i : pre_active) sum[i * n_output + j] += kernel.a_plus * pre_at(i, t);
    }
    for (std::size_t i : pre_now) {
      for (std::size_t j : post_active) sum[i * n_output + j] -= kernel.a_minus * post_at(j, t);
    }

    for (std::size_t i : pre_now) {
      pre_trace[i] = pre_at(i, t) + 1.0;
      pre_time[i] = t;
      if (!pre_seen[i]) {
        pre_seen[i] = 1;
        pre_active.push_back(i);
      }
    }
    for (std::size_t j : post_now) {
      post_trace[j] = post_at(j, t) + 1.0;
      post_time[j] = t;
      if (!post_seen[j]) {
        post_seen[j] = 1;
        post_active.push_back(j);
      }
    }
  }

  EligibilityMatrix e(n_input, n_output, storage);
  for (std::size_t i = 0; i < n_input; ++i) {
    for (std::size_t j = 0; j < n_output; ++j) e.set(i, j, sum[i * n_output + j]);
  }
  return e;
}

double digitize_value(double value, const TraceConfig& storage) noexcept {
  const double sat = storage.saturation;
  const double step = 2.0 * sat / static_cast<double>(storage.adc_levels - 1);
  const double clamped = std::clamp(value, -sat, sat);
  const auto top = static_cast<long long>(storage.adc_levels - 1);
  const long long code = std::clamp(std::llround((clamped + sat) / step), 0LL, top);
  // Odd level counts have an exact zero code; keep it exact.
  if (2 * code == top) return 0.0;
  return -sat + static_cast<double>(code) * step;
}

EligibilityMatrix digitize(const EligibilityMatrix& e) {
  EligibilityMatrix out(e.rows(), e.cols(), e.storage());
  for (std::size_t i = 0; i < e.rows(); ++i) {
    for (std::size_t j = 0; j < e.cols(); ++j) out.set(i, j, digitize_value(e(i, j), e.storage()));
  }
  return out;
}

std::vector<double> weight_deltas(const EligibilityMatrix& e, double reward, double baseline,
                                  const RstdpConfig& cfg) {
  const double factor = cfg.eta * (reward - baseline);
  std::vector<double> delta(e.values().size());
  std::transform(e.values().begin(), e.values().end(), delta.begin(),
                 [factor](double trace) { return factor * trace; });
  return delta;
}

SynapseMatrix rstdp_update(const SynapseMatrix& w, const EligibilityMatrix& e, double reward,
                           double baseline, const RstdpConfig& cfg, Rng* rng) {
  cfg.validate();
  if (w.rows() != e.rows() || w.cols() != e.cols()) {
    std::ostringstream msg;
    msg << "weight shape " << w.rows() << "x" << w.cols() << " does not match trace shape "
        << e.rows() << "x" << e.cols();
    throw ParameterError(msg.str());
  }
  if (reward == baseline) return w;

  const bool stochastic = cfg.stochastic_rounding && !w.continuous();
  if (stochastic && rng == nullptr) throw ParameterError("stochastic rounding requires an RNG");
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto delta = weight_deltas(e, reward, baseline, cfg);
  SynapseMatrix out = w;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      const double d = delta[i * w.cols() + j];
      if (d == 0.0) continue;
      const double target = w.clip(w(i, j) + d);
      if (!stochastic) {
        out.set_raw(i, j, w.quantize(target));
        continue;
      }
      const double pos = (target - w.w_min()) / w.step();
      const double floor_level = std::floor(pos);
      const double up = unit(*rng) < pos - floor_level ? 1.0 : 0.0;
      out.set_raw(i, j, w.quantize(w.value_of_level(static_cast<std::int64_t>(floor_level + up))));
    }
  }
  return out;
}

RewardBaseline update_baseline(const RewardBaseline& baseline, double reward, std::size_t state,
                               const RstdpConfig& cfg) {
  if (!(reward >= 0.0 && reward <= 1.0)) throw ParameterError("reward must lie in [0, 1]");
  if (!(cfg.baseline_gamma > 0.0 && cfg.baseline_gamma <= 1.0)) {
    throw ParameterError("baseline gamma must lie in (0, 1]");
  }
  RewardBaseline out = baseline;
  std::size_t idx = 0;
  if (out.mode == BaselineMode::kPerState) {
    if (state >= out.values.size()) throw ParameterError("baseline state index out of range");
    idx = state;
  } else if (out.values.empty()) {
    throw ParameterError("global baseline has no entry");
  }
  const double g = cfg.baseline_gamma;
  const double old = out.values[idx];
  const double blended = g == 1.0 ? reward : (1.0 - g) * old + g * reward;
  out.values[idx] = std::clamp(blended, std::min(old, reward), std::max(old, reward));
  return out;
}

}  // namespace neuropong
