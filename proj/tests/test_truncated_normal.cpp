#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ktau/error.hpp"
#include "ktau/truncated_normal.hpp"

using namespace ktau;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Upper tail probability of the standard normal.
double upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Exact CDF of N(0,1) truncated to (a, b), written through upper tails.
double truncated_cdf(double x, double a, double b) {
  return (upper_tail(a) - upper_tail(x)) / (upper_tail(a) - upper_tail(b));
}

double ks_distance(std::vector<double> draws, double a, double b) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = truncated_cdf(draws[i], a, b);
    d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  return d;
}

}  // namespace

TEST(TruncatedNormal, UntruncatedMoments) {
  Rng rng(1);
  const int count = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < count; ++i) {
    const double v = sample_truncated_normal(1.5, 2.0, -kInf, kInf, rng);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / count;
  EXPECT_NEAR(mean, 1.5, 4.0 * 2.0 / std::sqrt(count));
  EXPECT_NEAR(sq / count - mean * mean, 4.0, 0.1);
}

TEST(TruncatedNormal, HalfNormalMean) {
  Rng rng(2);
  const int count = 100000;
  double sum = 0.0;
  for (int i = 0; i < count; ++i) {
    const double v = sample_truncated_normal(0.0, 1.0, 0.0, kInf, rng);
    ASSERT_GT(v, 0.0);
    sum += v;
  }
  EXPECT_NEAR(sum / count, std::sqrt(2.0 / std::numbers::pi), 0.01);
}

TEST(TruncatedNormal, FarTailsStayInSupport) {
  Rng rng(3);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double v = sample_truncated_normal(0.0, 1.0, 5.0, kInf, rng);
    ASSERT_TRUE(std::isfinite(v));
    ASSERT_GT(v, 5.0);
    sum += v;
    const double w = sample_truncated_normal(0.0, 1.0, -kInf, -30.0, rng);
    ASSERT_LT(w, -30.0);
  }
  // Mean of the tail beyond a is phi(a) / Q(a).
  const double phi5 = std::exp(-12.5) / std::sqrt(2.0 * std::numbers::pi);
  EXPECT_NEAR(sum / 10000, phi5 / upper_tail(5.0), 0.01);
}

TEST(TruncatedNormal, MatchesExactCdfAcrossRegimes) {
  struct Case {
    double a, b;
  };
  // central inverse-CDF, one-sided, upper-tail reflection, tail rejection
  // with an upper bound, and narrow-interval rejection.
  for (const Case c : {Case{-1.0, 2.0}, Case{-kInf, -0.5}, Case{1.5, 3.0}, Case{6.5, 7.0},
                       Case{8.0, kInf}, Case{0.2, 0.45}, Case{-3.1, -2.9}}) {
    Rng rng(17);
    std::vector<double> draws(20000);
    for (auto& d : draws) {
      d = sample_truncated_normal(0.0, 1.0, c.a, c.b, rng);
      ASSERT_GT(d, c.a);
      ASSERT_LT(d, c.b);
    }
    EXPECT_LT(ks_distance(draws, c.a, c.b), 0.015) << "(" << c.a << ", " << c.b << ")";
  }
}

TEST(TruncatedNormal, ScaledAndShifted) {
  Rng rng(4);
  std::vector<double> draws(20000);
  for (auto& d : draws) d = (sample_truncated_normal(3.0, 0.5, 2.0, 3.5, rng) - 3.0) / 0.5;
  EXPECT_LT(ks_distance(draws, -2.0, 1.0), 0.015);
}

TEST(TruncatedNormal, TinyIntervalStaysStrictlyInside) {
  Rng rng(5);
  const double lo = 0.3;
  const double hi = std::nextafter(std::nextafter(lo, 1.0), 1.0);
  for (int i = 0; i < 100; ++i) {
    const double v = sample_truncated_normal(10.0, 1e-3, lo, hi, rng);
    EXPECT_GT(v, lo);
    EXPECT_LT(v, hi);
  }
}

TEST(TruncatedNormal, Errors) {
  Rng rng(6);
  EXPECT_THROW(sample_truncated_normal(0, 1, 1.0, 1.0, rng), SamplerError);
  EXPECT_THROW(sample_truncated_normal(0, 1, 2.0, 1.0, rng), SamplerError);
  EXPECT_THROW(sample_truncated_normal(0, 0.0, 0.0, 1.0, rng), InvalidInput);
  const double lo = 0.5;
  EXPECT_THROW(sample_truncated_normal(0, 1, lo, std::nextafter(lo, 1.0), rng), SamplerError);
}
