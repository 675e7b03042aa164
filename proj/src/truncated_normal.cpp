#include "ktau/truncated_normal.hpp"

#include <algorithm>
#include <cmath>

#include "ktau/error.hpp"
#include "ktau/normal.hpp"

namespace ktau {
namespace {

constexpr double kTailStart = 6.0;

// Intervals with (far^2 - near^2) / 2 below this are sampled by uniform
// rejection; the acceptance probability is then at least exp(-0.5).
constexpr double kNarrowSpread = 0.5;

// Standard normal restricted to (a, b) with a >= kTailStart. Robert (1995)
// translated-exponential proposal.
double sample_right_tail(double a, double b, Rng& rng) {
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a + rng.exponential() / lambda;
    if (x >= b) continue;
    const double d = x - lambda;
    if (rng.uniform() <= std::exp(-0.5 * d * d)) return x;
  }
}

// Standard normal restricted to (a, b), b <= 0 or a <= 0 < b.
double sample_left_or_central(double a, double b, Rng& rng) {
  if (b < -kTailStart) return -sample_right_tail(-b, -a, rng);
  const double pa = normal_cdf(a);
  const double pb = normal_cdf(b);
  const double u = rng.uniform();
  return normal_quantile(u * pb + (1.0 - u) * pa);
}

}  // namespace

double sample_truncated_normal(double mean, double sd, double lower, double upper, Rng& rng) {
  if (!(sd > 0.0) || !std::isfinite(sd)) throw InvalidInput("truncated normal needs sd > 0");
  if (!(lower < upper)) throw SamplerError("empty truncation interval");

  const double a = (lower - mean) / sd;
  const double b = (upper - mean) / sd;

  double result = 0.0;
  bool narrow = false;
  if (std::isfinite(a) && std::isfinite(b)) {
    const double near = a > 0.0 ? a : (b < 0.0 ? b : 0.0);
    const double far = std::max(std::abs(a), std::abs(b));
    narrow = 0.5 * (far * far - near * near) <= kNarrowSpread;
    // Uniform proposal in the original units; exact for any width.
    while (narrow) {
      result = lower + (upper - lower) * rng.uniform();
      const double x = (result - mean) / sd;
      if (rng.uniform() <= std::exp(-0.5 * (x * x - near * near))) break;
    }
  }
  if (!narrow) {
    const double x = a > 0.0 ? -sample_left_or_central(-b, -a, rng)
                             : sample_left_or_central(a, b, rng);
    result = mean + sd * x;
  }

  if (result <= lower) result = std::nextafter(lower, upper);
  if (result >= upper) result = std::nextafter(upper, lower);
  if (!(result > lower && result < upper)) throw SamplerError("empty truncation interval");
  return result;
}

}  // namespace ktau
