#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ktau/error.hpp"
#include "ktau/rank_core.hpp"

using namespace ktau;

namespace {

// Independent O(n^2) enumeration straight from the pair definition.
double brute_force_tau(const std::vector<double>& x, const std::vector<double>& y) {
  long score = 0;
  long pairs = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double prod = (x[i] - x[j]) * (y[i] - y[j]);
      score += prod > 0 ? 1 : (prod < 0 ? -1 : 0);
      ++pairs;
    }
  }
  return static_cast<double>(score) / static_cast<double>(pairs);
}

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> dist;
  std::vector<double> v(n);
  for (auto& e : v) e = dist(gen);
  return v;
}

}  // namespace

TEST(ConcordanceIndicator, Examples) {
  EXPECT_EQ(concordance_indicator(1, 2, 3, 4), 1);
  EXPECT_EQ(concordance_indicator(1, 4, 3, 2), -1);
  EXPECT_EQ(concordance_indicator(1, 2, 1, 5), 0);
  EXPECT_EQ(concordance_indicator(1, 2, 3, 2), 0);
}

TEST(ConcordanceIndicator, TinyDifferencesDoNotUnderflow) {
  EXPECT_EQ(concordance_indicator(0.0, 0.0, 1e-200, 1e-200), 1);
}

TEST(KendallTau, Examples) {
  EXPECT_DOUBLE_EQ(kendall_tau(PairedSample({1, 2, 3}, {10, 20, 30})), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(PairedSample({1, 2}, {2, 1})), -1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(PairedSample({1, 2, 3, 4}, {2, 1, 4, 3})), 1.0 / 3.0);
}

TEST(KendallTau, TiesScoreZeroAndKeepDenominator) {
  // pairs: (0,1) tie in x, (0,2) +, (1,2) + -> 2 / 3
  const PairedSample s({1, 1, 2}, {1, 2, 3});
  const auto c = concordance_summary(s);
  EXPECT_EQ(c.concordant, 2u);
  EXPECT_EQ(c.discordant, 0u);
  EXPECT_EQ(c.tied, 1u);
  EXPECT_EQ(c.total_pairs, 3u);
  EXPECT_DOUBLE_EQ(kendall_tau(s), 2.0 / 3.0);
}

TEST(PairedSample, RejectsInvalidInput) {
  EXPECT_THROW(PairedSample({1}, {1}), InvalidInput);
  EXPECT_THROW(PairedSample({1, 2}, {1}), InvalidInput);
  EXPECT_THROW(PairedSample({1, NAN}, {1, 2}), InvalidInput);
  EXPECT_THROW(PairedSample({1, 2}, {INFINITY, 2}), InvalidInput);
}

TEST(TStar, Examples) {
  EXPECT_DOUBLE_EQ(t_star(0.0, 20), 0.0);
  EXPECT_NEAR(t_star(0.5, 10), 2.0124611797498106, 1e-14);
  for (double tau : {0.1, 0.37, 0.9}) {
    EXPECT_DOUBLE_EQ(t_star(-tau, 33), -t_star(tau, 33));
  }
  EXPECT_THROW(t_star(0.3, 1), InvalidInput);
}

TEST(KendallTau, BruteForceOracleSmallSamples) {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 2 + rep % 7;
    auto x = random_vector(gen, n);
    auto y = random_vector(gen, n);
    // Coarsen every other sample to force ties.
    if (rep % 2 == 1) {
      for (auto& v : x) v = std::round(v);
      for (auto& v : y) v = std::round(v);
    }
    EXPECT_EQ(kendall_tau(PairedSample(x, y)), brute_force_tau(x, y));
  }
}

TEST(KendallTau, SymmetryAndMonotoneInvariance) {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 3 + rep % 40;
    const auto x = random_vector(gen, n);
    const auto y = random_vector(gen, n);
    const PairedSample s(x, y);
    const double tau = kendall_tau(s);

    EXPECT_EQ(kendall_tau(PairedSample(y, x)), tau);
    EXPECT_EQ(kendall_tau(s.mirrored()), -tau);

    std::vector<double> ex(n), cube(n);
    std::transform(x.begin(), x.end(), ex.begin(), [](double v) { return std::exp(v); });
    std::transform(y.begin(), y.end(), cube.begin(), [](double v) { return v * v * v; });
    EXPECT_EQ(kendall_tau(PairedSample(ex, cube)), tau);
    EXPECT_EQ(kendall_tau(PairedSample(mid_ranks(x), mid_ranks(y))), tau);
  }
}

TEST(KendallTau, UnitMagnitudeIffMonotone) {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rep % 20;
    const auto x = random_vector(gen, n);
    std::vector<double> inc(n), dec(n);
    std::transform(x.begin(), x.end(), inc.begin(), [](double v) { return std::atan(v) + 3; });
    std::transform(x.begin(), x.end(), dec.begin(), [](double v) { return -std::exp(v); });
    EXPECT_EQ(kendall_tau(PairedSample(x, inc)), 1.0);
    EXPECT_EQ(kendall_tau(PairedSample(x, dec)), -1.0);

    if (n >= 3) {
      // Swapping the y values of the two smallest x breaks monotonicity.
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
      std::swap(inc[order[0]], inc[order[1]]);
      EXPECT_LT(std::abs(kendall_tau(PairedSample(x, inc))), 1.0);
    }
  }
}

TEST(MidRanks, AveragesTies) {
  const std::vector<double> v{3.0, 1.0, 3.0, 2.0};
  EXPECT_EQ(mid_ranks(v), (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
}

TEST(KendallTau, MergeCountMatchesPairwiseWithTies) {
  std::mt19937_64 gen(21);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rep % 150;
    auto x = random_vector(gen, n);
    auto y = random_vector(gen, n);
    const double grain = rep % 3 == 0 ? 1.0 : (rep % 3 == 1 ? 0.25 : 0.0);
    if (grain > 0) {
      for (auto& v : x) v = std::round(v / grain);
      for (auto& v : y) v = std::round(v / grain);
    }
    const PairedSample s(x, y);
    EXPECT_EQ(kendall_tau_merge(s), kendall_tau_pairwise(s)) << "n = " << n;
    EXPECT_EQ(kendall_tau(s), brute_force_tau(x, y));
  }
}
