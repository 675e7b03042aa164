#pragma once

namespace ktau {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, accurate in both tails.
double normal_cdf(double x);

/// Inverse of normal_cdf on (0, 1). Full double precision.
double normal_quantile(double p);

}  // namespace ktau
