#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "ktau/asymptotic.hpp"
#include "ktau/latent_sampler.hpp"

namespace ktau {

struct PosteriorSummary {
  double median = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double ci_level = 0.95;
  double density_at_zero = 0.0;
};

using Posterior = std::variant<PosteriorGrid, PosteriorSamples>;

/// Quantiles of a grid posterior from its cumulative trapezoid integral,
/// linearly interpolated.
std::vector<double> posterior_quantiles(const PosteriorGrid& grid, std::span<const double> probs);

/// Empirical quantiles of the tau draws, linear between order statistics.
std::vector<double> posterior_quantiles(const PosteriorSamples& samples,
                                        std::span<const double> probs);
std::vector<double> posterior_quantiles(const Posterior& p, std::span<const double> probs);

/// Empirical quantiles of an arbitrary sample (copied and sorted).
std::vector<double> empirical_quantiles(std::span<const double> draws,
                                        std::span<const double> probs);

/// Linear interpolation of the grid density at tau.
double grid_density_at(const PosteriorGrid& grid, double tau);

/// Gaussian kernel density at `at`, Silverman bandwidth, reflected at +-1.
double kde_density_at(std::span<const double> draws, double at);

PosteriorSummary summarize(const PosteriorGrid& grid, double ci_level = 0.95);
PosteriorSummary summarize(const PosteriorSamples& samples, double ci_level = 0.95);
PosteriorSummary summarize(const Posterior& p, double ci_level = 0.95);

/// Summary of plain tau draws (used for draws that did not come from a chain).
PosteriorSummary summarize_draws(std::span<const double> tau_draws, double ci_level = 0.95);

/// Savage-Dickey ratio: posterior density at tau = 0 over prior density at 0.
double savage_dickey_bf01(double posterior_density_at_zero, const PriorOnTau& prior);
/// Density at zero is floored at DBL_MIN, so the result is never exactly 0.
double savage_dickey_bf01(const Posterior& p, const PriorOnTau& prior = cosine_prior());

struct BayesFactorPair {
  double bf01 = 1.0;
  double bf10 = 1.0;
};

/// bf10 ~= 1 / bf01, each moved by at most a few ulps so that
/// bf01 * bf10 == 1 holds exactly in double arithmetic.
BayesFactorPair reciprocal_pair(double bf01);

struct QuantileAveragedPosterior {
  std::vector<double> probs;
  std::vector<double> avg_quantiles;
  std::size_t replication_count = 0;
};

/// 0.01, 0.02, ..., 0.99.
std::vector<double> default_probs();

QuantileAveragedPosterior quantile_average(std::span<const Posterior> posteriors,
                                           std::span<const double> probs);

/// Same average from quantile vectors already evaluated at `probs`.
QuantileAveragedPosterior average_quantile_vectors(std::span<const std::vector<double>> quantiles,
                                                   std::span<const double> probs);

/// Draws by inverse-CDF resampling of a grid posterior.
std::vector<double> sample_from_grid(const PosteriorGrid& grid, std::size_t count, Rng& rng);

}  // namespace ktau
