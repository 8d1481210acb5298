#include "neuropong/synapse_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "neuropong/error.hpp"

namespace neuropong {

SynapseMatrix::SynapseMatrix(std::size_t n_input, std::size_t n_output, double w_min,
                             double w_max, std::size_t levels)
    : n_input_(n_input), n_output_(n_output), w_min_(w_min), w_max_(w_max), levels_(levels) {
  if (n_input == 0 || n_output == 0) throw ParameterError("synapse matrix needs a non-empty shape");
  if (!(w_max > w_min)) throw ParameterError("synapse matrix needs w_max > w_min");
  if (levels == 1) throw ParameterError("synapse matrix needs levels >= 2 (or 0 for continuous)");
  w_.assign(n_input * n_output, w_min);
}

double SynapseMatrix::step() const noexcept {
  return continuous() ? 0.0 : (w_max_ - w_min_) / static_cast<double>(levels_ - 1);
}

void SynapseMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= n_input_ || j >= n_output_) throw ParameterError("synapse index out of range");
  w_[i * n_output_ + j] = quantize(value);
}

double SynapseMatrix::clip(double value) const noexcept { return std::clamp(value, w_min_, w_max_); }

std::int64_t SynapseMatrix::level_of(double value) const noexcept {
  if (continuous()) return 0;
  const auto top = static_cast<std::int64_t>(levels_ - 1);
  const auto k = static_cast<std::int64_t>(std::llround((clip(value) - w_min_) / step()));
  return std::clamp<std::int64_t>(k, 0, top);
}

double SynapseMatrix::value_of_level(std::int64_t level) const noexcept {
  return w_min_ + static_cast<double>(level) * step();
}

double SynapseMatrix::quantize(double value) const noexcept {
  if (continuous()) return clip(value);
  return value_of_level(level_of(value));
}

bool SynapseMatrix::representable(double value) const noexcept {
  if (value < w_min_ || value > w_max_) return false;
  return continuous() || quantize(value) == value;
}

}  // namespace neuropong
