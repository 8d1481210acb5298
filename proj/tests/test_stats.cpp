#include <gtest/gtest.h>

#include <vector>

#include "neuropong/error.hpp"
#include "neuropong/stats.hpp"

using namespace neuropong;

TEST(Stats, QuantileType7) {
  const std::vector<double> x{4.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(stats::quantile(x, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(stats::quantile(x, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(stats::quantile(x, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(stats::median(x), 2.5);
  EXPECT_DOUBLE_EQ(stats::quantile(x, 0.1), 1.3);
  EXPECT_THROW(stats::quantile(std::vector<double>{}, 0.5), ParameterError);
}

TEST(Stats, AverageRanks) {
  const std::vector<double> x{10.0, 20.0, 10.0, 30.0};
  EXPECT_EQ(stats::ranks(x), (std::vector<double>{1.5, 3.0, 1.5, 4.0}));
}

TEST(Stats, SpearmanKnownValues) {
  const std::vector<double> x{1, 2, 3, 4, 5}, up{2, 4, 6, 8, 100}, down{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(stats::spearman(x, up), 1.0);
  EXPECT_DOUBLE_EQ(stats::spearman(x, down), -1.0);
  // 1 - 6 * sum(d^2) / (n (n^2 - 1)) with d = (0, -1, 1, 0, 0)
  const std::vector<double> swapped{1, 3, 2, 4, 5};
  EXPECT_NEAR(stats::spearman(x, swapped), 0.9, 1e-12);
  EXPECT_THROW(stats::spearman(x, std::vector<double>(5, 1.0)), UndefinedCorrelationError);
}

TEST(Stats, PermutationTest) {
  std::vector<double> x, y;
  for (int i = 0; i < 30; ++i) {
    x.push_back(i);
    y.push_back(i * 2.0 + (i % 3));
  }
  const auto strong = stats::spearman_permutation_test(x, y, 999, 1);
  EXPECT_GT(strong.statistic, 0.9);
  EXPECT_DOUBLE_EQ(strong.p_value, 1.0 / 1000.0);
  std::vector<double> rev(y.rbegin(), y.rend());
  const auto none = stats::spearman_permutation_test(x, rev, 999, 1);
  EXPECT_GT(none.p_value, 0.99);
  EXPECT_EQ(stats::spearman_permutation_test(x, y, 200, 5).p_value,
            stats::spearman_permutation_test(x, y, 200, 5).p_value);
}
