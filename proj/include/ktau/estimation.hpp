#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "ktau/asymptotic.hpp"
#include "ktau/latent_sampler.hpp"
#include "ktau/posterior_summary.hpp"

namespace ktau {

enum class Method { original, enhanced, latent };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

struct EstimateOptions {
  double ci_level = 0.95;
  std::size_t grid_size = kDefaultGridSize;
  ChainConfig chain;
};

struct Estimate {
  Method method = Method::original;
  std::size_t n = 0;
  double tau_obs = 0.0;
  Posterior posterior;
  PosteriorSummary summary;
  double bf01 = 1.0;
};

/// Posterior for tau under one method, with summary and Savage-Dickey BF01
/// against the cosine prior.
Estimate estimate(const PairedSample& s, Method method, const EstimateOptions& options = {});

}  // namespace ktau
