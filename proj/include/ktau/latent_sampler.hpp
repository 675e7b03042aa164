#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ktau/random.hpp"
#include "ktau/rank_core.hpp"

namespace ktau {

struct TruncationBounds {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// lower = max latents[j] over observed[j] < observed[i]; upper = min
/// latents[j] over observed[j] > observed[i]. Infinite when the set is empty.
/// Ties with observed[i] impose nothing. O(n); see OrdinalLayout for the
/// sampler's fast path.
TruncationBounds truncation_bounds(std::span<const double> latents,
                                   std::span<const double> observed, std::size_t i);

/// Observed values grouped into tie classes in increasing order, so that
/// bounds only look at the neighbouring classes.
class OrdinalLayout {
 public:
  explicit OrdinalLayout(std::span<const double> observed);

  /// Equal to truncation_bounds(latents, observed, i).
  TruncationBounds bounds(std::span<const double> latents, std::size_t i) const;

  std::size_t size() const noexcept { return group_of_.size(); }

 private:
  std::vector<std::size_t> order_;         // indices sorted by observed value
  std::vector<std::size_t> group_start_;   // offsets into order_, plus end sentinel
  std::vector<std::size_t> group_of_;
};

struct LatentState {
  std::vector<double> z_x;
  std::vector<double> z_y;
  double rho = 0.0;
};

/// True when x_i < x_j implies z_x_i < z_x_j for all pairs (and likewise y).
bool respects_ordering(const LatentState& state, const PairedSample& s);

/// Normal scores Phi^-1(midrank / (n + 1)) and rho = sin(pi tau_obs / 2)
/// clamped to [-0.99, 0.99].
LatentState initial_state(const PairedSample& s);

struct ChainConfig {
  std::size_t total_iterations = 5500;
  std::size_t burn_in = 500;
  std::size_t thinning = 1;
  std::uint64_t seed = 1;
  double proposal_sd_scale = 1.0;
  /// Adds the (1 - rho*^2) / (1 - rho^2) correction for the random walk on
  /// atanh(rho). Off reproduces the plain likelihood-ratio acceptance.
  bool hastings_correction = false;

  /// Throws InvalidInput when burn_in >= total_iterations, thinning == 0 or
  /// proposal_sd_scale <= 0.
  void validate() const;
};

struct PosteriorSamples {
  std::vector<double> rho_draws;
  std::vector<double> tau_draws;
  double acceptance_rate = 0.0;
  ChainConfig config;
};

/// One systematic-scan sweep: every z_x_i in ascending index order from
/// N(rho z_y_i, sqrt(1 - rho^2)) truncated to its current bounds, then every
/// z_y_i likewise.
void gibbs_update_latents(LatentState& state, const OrdinalLayout& layout_x,
                          const OrdinalLayout& layout_y, Rng& rng);
void gibbs_update_latents(LatentState& state, const PairedSample& s, Rng& rng);

/// Sufficient statistics of the latent scores for the bivariate normal
/// likelihood.
struct LatentMoments {
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  std::size_t n = 0;

  static LatentMoments of(const LatentState& state);
};

/// log prod_i N2((z_x_i, z_y_i); 0, [[1, rho], [rho, 1]]).
double latent_log_likelihood(const LatentMoments& m, double rho);

struct RhoStep {
  double rho = 0.0;
  bool accepted = false;
};

/// Random-walk Metropolis step on atanh(rho) with step sd
/// proposal_sd_scale / sqrt(n - 3). Throws InvalidInput when n <= 3.
RhoStep mh_update_rho(const LatentMoments& moments, double rho, Rng& rng,
                      double proposal_sd_scale = 1.0, bool hastings_correction = false);
RhoStep mh_update_rho(const LatentState& state, Rng& rng, double proposal_sd_scale = 1.0,
                      bool hastings_correction = false);

/// (2/pi) asin(rho). Throws InvalidInput for |rho| > 1.
double greiner_transform(double rho);

/// Inverse of greiner_transform: sin(pi tau / 2).
double greiner_inverse(double tau);

/// Full data-augmentation chain. Requires n >= 4. Deterministic in
/// (sample, config).
PosteriorSamples run_chain(const PairedSample& s, const ChainConfig& config = {});

}  // namespace ktau
