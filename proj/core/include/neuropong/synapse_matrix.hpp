#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace neuropong {

// Dense input x output weight array with bounded, optionally quantized values.
//
// In quantized mode (`levels >= 2`) every stored weight is one of `levels`
// uniformly spaced values spanning [w_min, w_max]; the default 64-level range
// [0, 63] makes level index and weight value coincide. `levels == 0` selects
// continuous mode, where weights are only clipped.
class SynapseMatrix {
 public:
  static constexpr std::size_t kContinuous = 0;

  SynapseMatrix() = default;
  SynapseMatrix(std::size_t n_input, std::size_t n_output, double w_min = 0.0,
                double w_max = 63.0, std::size_t levels = 64);

  std::size_t rows() const noexcept { return n_input_; }
  std::size_t cols() const noexcept { return n_output_; }
  std::size_t size() const noexcept { return w_.size(); }
  double w_min() const noexcept { return w_min_; }
  double w_max() const noexcept { return w_max_; }
  std::size_t levels() const noexcept { return levels_; }
  bool continuous() const noexcept { return levels_ == kContinuous; }
  // Distance between adjacent levels; 0 in continuous mode.
  double step() const noexcept;

  double operator()(std::size_t i, std::size_t j) const noexcept { return w_[i * n_output_ + j]; }
  // Stores clip-then-quantize(value).
  void set(std::size_t i, std::size_t j, double value);
  // Stores `value` verbatim; caller guarantees it is already representable.
  void set_raw(std::size_t i, std::size_t j, double value) noexcept { w_[i * n_output_ + j] = value; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {w_.data() + i * n_output_, n_output_};
  }
  std::span<const double> values() const noexcept { return w_; }

  double clip(double value) const noexcept;
  // Nearest representable value (ties round away from zero level index).
  double quantize(double value) const noexcept;
  // Level index of a stored value; in continuous mode this is undefined.
  std::int64_t level_of(double value) const noexcept;
  double value_of_level(std::int64_t level) const noexcept;
  bool representable(double value) const noexcept;

  bool same_shape(const SynapseMatrix& other) const noexcept {
    return n_input_ == other.n_input_ && n_output_ == other.n_output_;
  }
  friend bool operator==(const SynapseMatrix&, const SynapseMatrix&) = default;

 private:
  std::size_t n_input_ = 0;
  std::size_t n_output_ = 0;
  double w_min_ = 0.0;
  double w_max_ = 63.0;
  std::size_t levels_ = 64;
  std::vector<double> w_;
};

}  // namespace neuropong
