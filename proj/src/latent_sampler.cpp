#include "ktau/latent_sampler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ktau/error.hpp"
#include "ktau/normal.hpp"
#include "ktau/truncated_normal.hpp"

namespace ktau {

TruncationBounds truncation_bounds(std::span<const double> latents,
                                   std::span<const double> observed, std::size_t i) {
  TruncationBounds out;
  const double oi = observed[i];
  for (std::size_t j = 0; j < observed.size(); ++j) {
    if (observed[j] < oi) {
      out.lower = std::max(out.lower, latents[j]);
    } else if (observed[j] > oi) {
      out.upper = std::min(out.upper, latents[j]);
    }
  }
  return out;
}

OrdinalLayout::OrdinalLayout(std::span<const double> observed)
    : order_(observed.size()), group_of_(observed.size()) {
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return observed[a] < observed[b]; });
  for (std::size_t k = 0; k < order_.size(); ++k) {
    if (k == 0 || observed[order_[k]] != observed[order_[k - 1]]) group_start_.push_back(k);
    group_of_[order_[k]] = group_start_.size() - 1;
  }
  group_start_.push_back(order_.size());
}

// Under the ordering invariant every member of a lower tie class sits below
// every member of a higher one, so only the adjacent classes matter.
TruncationBounds OrdinalLayout::bounds(std::span<const double> latents, std::size_t i) const {
  TruncationBounds out;
  const std::size_t g = group_of_[i];
  if (g > 0) {
    for (std::size_t k = group_start_[g - 1]; k < group_start_[g]; ++k) {
      out.lower = std::max(out.lower, latents[order_[k]]);
    }
  }
  if (g + 2 < group_start_.size()) {
    for (std::size_t k = group_start_[g + 1]; k < group_start_[g + 2]; ++k) {
      out.upper = std::min(out.upper, latents[order_[k]]);
    }
  }
  return out;
}

namespace {

bool strictly_ordered(std::span<const double> observed, std::span<const double> latents) {
  for (std::size_t i = 0; i < observed.size(); ++i) {
    for (std::size_t j = 0; j < observed.size(); ++j) {
      if (observed[i] < observed[j] && !(latents[i] < latents[j])) return false;
    }
  }
  return true;
}

}  // namespace

bool respects_ordering(const LatentState& state, const PairedSample& s) {
  return state.z_x.size() == s.size() && state.z_y.size() == s.size() &&
         strictly_ordered(s.x(), state.z_x) && strictly_ordered(s.y(), state.z_y);
}

LatentState initial_state(const PairedSample& s) {
  const double scale = 1.0 / (static_cast<double>(s.size()) + 1.0);
  auto scores = [&](std::span<const double> v) {
    auto r = mid_ranks(v);
    for (auto& value : r) value = normal_quantile(value * scale);
    return r;
  };
  LatentState state;
  state.z_x = scores(s.x());
  state.z_y = scores(s.y());
  state.rho = std::clamp(greiner_inverse(kendall_tau(s)), -0.99, 0.99);
  return state;
}

void ChainConfig::validate() const {
  if (total_iterations == 0 || burn_in >= total_iterations) {
    throw InvalidInput("chain config: burn_in must be < total_iterations");
  }
  if (thinning == 0) throw InvalidInput("chain config: thinning must be >= 1");
  if (!(proposal_sd_scale > 0.0)) throw InvalidInput("chain config: proposal_sd_scale must be > 0");
}

void gibbs_update_latents(LatentState& state, const OrdinalLayout& layout_x,
                          const OrdinalLayout& layout_y, Rng& rng) {
  const double sd = std::sqrt((1.0 - state.rho) * (1.0 + state.rho));
  const std::size_t n = state.z_x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = layout_x.bounds(state.z_x, i);
    state.z_x[i] = sample_truncated_normal(state.rho * state.z_y[i], sd, b.lower, b.upper, rng);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = layout_y.bounds(state.z_y, i);
    state.z_y[i] = sample_truncated_normal(state.rho * state.z_x[i], sd, b.lower, b.upper, rng);
  }
}

void gibbs_update_latents(LatentState& state, const PairedSample& s, Rng& rng) {
  gibbs_update_latents(state, OrdinalLayout(s.x()), OrdinalLayout(s.y()), rng);
}

LatentMoments LatentMoments::of(const LatentState& state) {
  LatentMoments m;
  m.n = state.z_x.size();
  for (std::size_t i = 0; i < m.n; ++i) {
    m.sxx += state.z_x[i] * state.z_x[i];
    m.sxy += state.z_x[i] * state.z_y[i];
    m.syy += state.z_y[i] * state.z_y[i];
  }
  return m;
}

double latent_log_likelihood(const LatentMoments& m, double rho) {
  const double one_minus = (1.0 - rho) * (1.0 + rho);
  const double n = static_cast<double>(m.n);
  return -n * std::log(2.0 * std::numbers::pi) - 0.5 * n * std::log(one_minus) -
         (m.sxx - 2.0 * rho * m.sxy + m.syy) / (2.0 * one_minus);
}

RhoStep mh_update_rho(const LatentMoments& moments, double rho, Rng& rng,
                      double proposal_sd_scale, bool hastings_correction) {
  if (moments.n <= 3) throw InvalidInput("Fisher proposal undefined: need n >= 4");
  const double step = proposal_sd_scale / std::sqrt(static_cast<double>(moments.n) - 3.0);
  const double proposal = std::tanh(std::atanh(rho) + step * rng.normal());
  const double u = rng.uniform();
  if (!(std::abs(proposal) < 1.0)) return {rho, false};

  double log_ratio =
      latent_log_likelihood(moments, proposal) - latent_log_likelihood(moments, rho);
  if (hastings_correction) {
    log_ratio += std::log((1.0 - proposal) * (1.0 + proposal)) -
                 std::log((1.0 - rho) * (1.0 + rho));
  }
  if (log_ratio >= 0.0 || std::log(u) < log_ratio) return {proposal, true};
  return {rho, false};
}

RhoStep mh_update_rho(const LatentState& state, Rng& rng, double proposal_sd_scale,
                      bool hastings_correction) {
  return mh_update_rho(LatentMoments::of(state), state.rho, rng, proposal_sd_scale,
                       hastings_correction);
}

double greiner_transform(double rho) {
  if (!(std::abs(rho) <= 1.0)) throw InvalidInput("greiner_transform: |rho| must be <= 1");
  return 2.0 / std::numbers::pi * std::asin(rho);
}

double greiner_inverse(double tau) { return std::sin(std::numbers::pi * tau / 2.0); }

PosteriorSamples run_chain(const PairedSample& s, const ChainConfig& config) {
  if (s.size() <= 3) throw InvalidInput("Fisher proposal undefined: latent method needs n >= 4");
  config.validate();

  const OrdinalLayout layout_x(s.x());
  const OrdinalLayout layout_y(s.y());
  LatentState state = initial_state(s);
  Rng rng(config.seed);

  PosteriorSamples out;
  out.config = config;
  const std::size_t kept = config.total_iterations - config.burn_in;
  out.rho_draws.reserve(kept / config.thinning + 1);
  std::size_t accepted = 0;

  for (std::size_t it = 0; it < config.total_iterations; ++it) {
    gibbs_update_latents(state, layout_x, layout_y, rng);
    assert(respects_ordering(state, s));
    const auto step = mh_update_rho(LatentMoments::of(state), state.rho, rng,
                                    config.proposal_sd_scale, config.hastings_correction);
    state.rho = step.rho;
    if (it < config.burn_in) continue;
    if (step.accepted) ++accepted;
    if ((it - config.burn_in) % config.thinning == 0) out.rho_draws.push_back(state.rho);
  }

  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(kept);
  out.tau_draws.resize(out.rho_draws.size());
  std::transform(out.rho_draws.begin(), out.rho_draws.end(), out.tau_draws.begin(),
                 greiner_transform);
  return out;
}

}  // namespace ktau
