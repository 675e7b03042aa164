#include "ktau/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ktau/error.hpp"
#include "ktau/random.hpp"

namespace ktau {

double prior_density(double tau) {
  if (!(std::abs(tau) < 1.0)) throw InvalidInput("outside support: |tau| must be < 1");
  return std::numbers::pi / 4.0 * std::cos(std::numbers::pi * tau / 2.0);
}

PriorOnTau cosine_prior() { return {"cosine", [](double tau) { return prior_density(tau); }}; }

double sample_cosine_prior(Rng& rng) {
  return 2.0 / std::numbers::pi * std::asin(2.0 * rng.uniform() - 1.0);
}

std::string_view to_string(GridMethod m) noexcept {
  switch (m) {
    case GridMethod::original_asymptotic: return "original";
    case GridMethod::enhanced_asymptotic: return "enhanced";
  }
  return "unknown";
}

std::vector<double> make_tau_grid(std::size_t size) {
  std::vector<double> grid(size);
  const double step = 2.0 * kGridEdge / static_cast<double>(size - 1);
  for (std::size_t i = 0; i < (size + 1) / 2; ++i) {
    grid[i] = -kGridEdge + step * static_cast<double>(i);
    grid[size - 1 - i] = -grid[i];
  }
  if (size % 2 == 1) grid[size / 2] = 0.0;
  return grid;
}

double enhanced_variance(double tau_obs, std::size_t n) {
  if (n < 2) throw InvalidInput("insufficient data: enhanced variance needs n >= 2");
  const double nd = static_cast<double>(n);
  return std::max(kVarianceFloor, 2.5 * nd * (1.0 - tau_obs * tau_obs) / (2.0 * nd + 5.0));
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double total = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) total += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return total;
}

PosteriorGrid asymptotic_posterior(double tau_obs, std::size_t n, GridMethod method,
                                   const PriorOnTau& prior, std::size_t grid_size) {
  if (grid_size < 101) throw InvalidInput("grid too coarse: grid_size must be >= 101");
  PosteriorGrid out;
  out.method = method;
  out.tau_obs = tau_obs;
  out.variance =
      method == GridMethod::original_asymptotic ? 1.0 : enhanced_variance(tau_obs, n);
  out.tau_grid = make_tau_grid(grid_size);
  out.density.resize(grid_size);

  const double t_obs = t_star(tau_obs, n);
  // Work in log space relative to the peak so large n cannot underflow the
  // whole grid.
  std::vector<double> log_lik(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double d = t_obs - t_star(out.tau_grid[i], n);
    log_lik[i] = -0.5 * d * d / out.variance;
  }
  const double peak = *std::max_element(log_lik.begin(), log_lik.end());
  for (std::size_t i = 0; i < grid_size; ++i) {
    out.density[i] = std::exp(log_lik[i] - peak) * prior(out.tau_grid[i]);
  }
  const double mass = trapezoid(out.tau_grid, out.density);
  if (!(mass > 0.0)) throw InvalidInput("posterior has no mass on the grid");
  for (auto& d : out.density) d /= mass;
  return out;
}

PosteriorGrid asymptotic_posterior(const PairedSample& s, GridMethod method,
                                   const PriorOnTau& prior, std::size_t grid_size) {
  return asymptotic_posterior(kendall_tau(s), s.size(), method, prior, grid_size);
}

}  // namespace ktau
