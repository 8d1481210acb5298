#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace neuropong::stats {

// Linearly interpolated sample quantile (Hyndman-Fan type 7, the R/NumPy
// default). `q` in [0, 1]. Throws ParameterError on empty input.
double quantile(std::span<const double> samples, double q);

double median(std::span<const double> samples);

double mean(std::span<const double> samples);

// Fractional ranks starting at 1; tied values share the average rank.
std::vector<double> ranks(std::span<const double> values);

// Pearson correlation. Throws UndefinedCorrelationError if either side has
// zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

double spearman(std::span<const double> x, std::span<const double> y);

struct PermutationResult {
  double statistic = 0.0;
  // One-sided: fraction of shuffles with rho >= observed, with the +1
  // correction so that p is never exactly zero.
  double p_value = 1.0;
  int n_shuffles = 0;
};

PermutationResult spearman_permutation_test(std::span<const double> x,
                                            std::span<const double> y,
                                            int n_shuffles, std::uint64_t seed);

}  // namespace neuropong::stats
