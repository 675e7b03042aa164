#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ktau/rank_core.hpp"

namespace ktau {

class Rng;

/// Density of the cosine prior (pi/4) cos(pi tau / 2), the prior on tau
/// implied by a uniform prior on the latent correlation. Throws InvalidInput
/// for |tau| >= 1.
double prior_density(double tau);

/// A prior on tau with support (-1, 1). `density` must integrate to one.
struct PriorOnTau {
  std::string name;
  std::function<double(double)> density;

  double operator()(double tau) const { return density(tau); }
};

PriorOnTau cosine_prior();

/// Inverse-CDF draw from the cosine prior: (2/pi) asin(2u - 1).
double sample_cosine_prior(Rng& rng);

enum class GridMethod { original_asymptotic, enhanced_asymptotic };

std::string_view to_string(GridMethod m) noexcept;

/// Discretized posterior density over tau, normalized by the trapezoid rule.
struct PosteriorGrid {
  std::vector<double> tau_grid;
  std::vector<double> density;
  GridMethod method = GridMethod::original_asymptotic;
  double tau_obs = 0.0;
  double variance = 1.0;  // sampling variance of T* used in the likelihood
};

inline constexpr std::size_t kDefaultGridSize = 2001;
inline constexpr double kGridEdge = 0.9999;
inline constexpr double kVarianceFloor = 1e-4;

/// `size` points equally spaced on [-0.9999, 0.9999], exactly symmetric
/// about zero.
std::vector<double> make_tau_grid(std::size_t size = kDefaultGridSize);

/// Upper bound 2.5 n (1 - tau^2) / (2n + 5) on the variance of T*, floored
/// at kVarianceFloor.
double enhanced_variance(double tau_obs, std::size_t n);

/// Grid posterior for tau. The likelihood is Normal(T*_obs; t_star(tau, n),
/// v), with v = 1 (original) or v = enhanced_variance(tau_obs, n) (enhanced).
PosteriorGrid asymptotic_posterior(const PairedSample& s, GridMethod method,
                                   const PriorOnTau& prior = cosine_prior(),
                                   std::size_t grid_size = kDefaultGridSize);

/// Same, from summary statistics only.
PosteriorGrid asymptotic_posterior(double tau_obs, std::size_t n, GridMethod method,
                                   const PriorOnTau& prior = cosine_prior(),
                                   std::size_t grid_size = kDefaultGridSize);

double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ktau
