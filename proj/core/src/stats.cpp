#include "neuropong/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "neuropong/error.hpp"
#include "neuropong/random.hpp"

namespace neuropong::stats {

double quantile(std::span<const double> samples, double q) {
  if (samples.empty()) throw ParameterError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("quantile level must lie in [0, 1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> samples) { return quantile(samples, 0.5); }

double mean(std::span<const double> samples) {
  if (samples.empty()) throw ParameterError("mean of an empty sample");
  return std::accumulate(samples.begin(), samples.end(), 0.0) /
         static_cast<double>(samples.size());
}

std::vector<double> ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> out(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = avg;
    i = j + 1;
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ParameterError("correlation inputs differ in length");
  if (x.size() < 2) throw UndefinedCorrelationError("correlation needs at least two points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelationError("correlation undefined: zero variance input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  return pearson(rx, ry);
}

PermutationResult spearman_permutation_test(std::span<const double> x,
                                            std::span<const double> y,
                                            int n_shuffles, std::uint64_t seed) {
  if (n_shuffles <= 0) throw ParameterError("permutation test needs at least one shuffle");
  PermutationResult result;
  result.statistic = spearman(x, y);
  result.n_shuffles = n_shuffles;
  const auto rx = ranks(x);
  auto ry = ranks(y);
  Rng rng(seed);
  int at_least = 0;
  for (int s = 0; s < n_shuffles; ++s) {
    std::shuffle(ry.begin(), ry.end(), rng);
    if (pearson(rx, ry) >= result.statistic - 1e-12) ++at_least;
  }
  result.p_value = static_cast<double>(at_least + 1) / static_cast<double>(n_shuffles + 1);
  return result;
}

}  // namespace neuropong::stats
