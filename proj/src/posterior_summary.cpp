#include "ktau/posterior_summary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "ktau/error.hpp"
#include "ktau/normal.hpp"
#include "ktau/random.hpp"

namespace ktau {
namespace {

std::vector<double> cumulative_trapezoid(const PosteriorGrid& grid) {
  const auto& x = grid.tau_grid;
  const auto& d = grid.density;
  std::vector<double> cdf(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * (x[i] - x[i - 1]) * (d[i] + d[i - 1]);
  }
  return cdf;
}

double invert_cdf(const std::vector<double>& x, const std::vector<double>& cdf, double p) {
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), p);
  if (it == cdf.begin()) return x.front();
  if (it == cdf.end()) return x.back();
  const auto i = static_cast<std::size_t>(it - cdf.begin());
  const double span = cdf[i] - cdf[i - 1];
  const double w = span > 0.0 ? (p - cdf[i - 1]) / span : 0.0;
  return x[i - 1] + w * (x[i] - x[i - 1]);
}

// Linear interpolation between order statistics (h = (N - 1) p).
double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void check_level(double ci_level) {
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw InvalidInput("ci_level must lie in (0, 1)");
}

void check_probs(std::span<const double> probs) {
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0 && probs[i] < 1.0) || (i > 0 && !(probs[i] > probs[i - 1]))) {
      throw InvalidInput("probs must be strictly increasing in (0, 1)");
    }
  }
}

}  // namespace

std::vector<double> posterior_quantiles(const PosteriorGrid& grid, std::span<const double> probs) {
  if (grid.tau_grid.empty()) throw InvalidInput("empty posterior");
  const auto cdf = cumulative_trapezoid(grid);
  std::vector<double> out(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) {
    out[k] = invert_cdf(grid.tau_grid, cdf, probs[k] * cdf.back());
  }
  return out;
}

std::vector<double> empirical_quantiles(std::span<const double> draws,
                                        std::span<const double> probs) {
  if (draws.empty()) throw InvalidInput("empty posterior");
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) out[k] = sorted_quantile(sorted, probs[k]);
  return out;
}

std::vector<double> posterior_quantiles(const PosteriorSamples& samples,
                                        std::span<const double> probs) {
  return empirical_quantiles(samples.tau_draws, probs);
}

std::vector<double> posterior_quantiles(const Posterior& p, std::span<const double> probs) {
  return std::visit([&](const auto& post) { return posterior_quantiles(post, probs); }, p);
}

double grid_density_at(const PosteriorGrid& grid, double tau) {
  const auto& x = grid.tau_grid;
  if (x.empty()) throw InvalidInput("empty posterior");
  if (tau <= x.front() || tau >= x.back()) return 0.0;
  const auto it = std::upper_bound(x.begin(), x.end(), tau);
  const auto i = static_cast<std::size_t>(it - x.begin());
  if (x[i - 1] == tau) return grid.density[i - 1];
  const double w = (tau - x[i - 1]) / (x[i] - x[i - 1]);
  return grid.density[i - 1] + w * (grid.density[i] - grid.density[i - 1]);
}

double kde_density_at(std::span<const double> draws, double at) {
  if (draws.empty()) throw InvalidInput("empty posterior");
  const double count = static_cast<double>(draws.size());
  double mean = 0.0;
  for (double d : draws) mean += d;
  mean /= count;
  double ss = 0.0;
  for (double d : draws) ss += (d - mean) * (d - mean);
  const double sd = draws.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;

  if (std::all_of(draws.begin(), draws.end(), [&](double d) { return d == draws.front(); })) {
    return draws.front() == at ? std::numeric_limits<double>::infinity() : 0.0;
  }
  const std::vector<double> quart = empirical_quantiles(draws, std::vector<double>{0.25, 0.75});
  double spread = std::min(sd, (quart[1] - quart[0]) / 1.34);
  if (!(spread > 0.0)) spread = sd;
  const double h = 0.9 * spread * std::pow(count, -0.2);

  // Reflection about +1 and -1 keeps the mass that a plain kernel would
  // leak outside the support.
  double total = 0.0;
  for (double d : draws) {
    for (double centre : {d, 2.0 - d, -2.0 - d}) {
      const double z = (at - centre) / h;
      if (std::abs(z) < 40.0) total += std::exp(-0.5 * z * z);
    }
  }
  const double kde = total / (count * h * std::sqrt(2.0 * std::numbers::pi));
  if (kde > 0.0) return kde;
  // No draw lies within reach of the kernel: fall back to a normal
  // approximation of the draws so the Bayes factor stays finite.
  const double z = (at - mean) / sd;
  return std::max(std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi)),
                  std::numeric_limits<double>::min());
}

PosteriorSummary summarize(const PosteriorGrid& grid, double ci_level) {
  check_level(ci_level);
  const std::vector<double> probs{0.5 * (1.0 - ci_level), 0.5, 0.5 * (1.0 + ci_level)};
  const auto q = posterior_quantiles(grid, probs);
  return {q[1], q[0], q[2], ci_level, grid_density_at(grid, 0.0)};
}

PosteriorSummary summarize_draws(std::span<const double> tau_draws, double ci_level) {
  check_level(ci_level);
  const std::vector<double> probs{0.5 * (1.0 - ci_level), 0.5, 0.5 * (1.0 + ci_level)};
  const auto q = empirical_quantiles(tau_draws, probs);
  return {q[1], q[0], q[2], ci_level, kde_density_at(tau_draws, 0.0)};
}

PosteriorSummary summarize(const PosteriorSamples& samples, double ci_level) {
  return summarize_draws(samples.tau_draws, ci_level);
}

PosteriorSummary summarize(const Posterior& p, double ci_level) {
  return std::visit([&](const auto& post) { return summarize(post, ci_level); }, p);
}

double savage_dickey_bf01(double posterior_density_at_zero, const PriorOnTau& prior) {
  const double prior_zero = prior(0.0);
  if (!(prior_zero > 0.0)) throw InvalidInput("Savage-Dickey undefined: prior density at 0 is 0");
  return posterior_density_at_zero / prior_zero;
}

double savage_dickey_bf01(const Posterior& p, const PriorOnTau& prior) {
  const double at_zero = std::visit(
      [](const auto& post) -> double {
        using T = std::decay_t<decltype(post)>;
        if constexpr (std::is_same_v<T, PosteriorGrid>) {
          // Same floor as the kernel estimate so both Bayes factors stay finite.
          return std::max(grid_density_at(post, 0.0), std::numeric_limits<double>::min());
        } else {
          return kde_density_at(post.tau_draws, 0.0);
        }
      },
      p);
  return savage_dickey_bf01(at_zero, prior);
}

BayesFactorPair reciprocal_pair(double bf01) {
  if (!(bf01 > 0.0) || !std::isfinite(bf01)) return {bf01, 1.0 / bf01};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  auto try_pair = [](double b) -> std::optional<BayesFactorPair> {
    const double r = 1.0 / b;
    for (double c : {r, std::nextafter(r, kInf), std::nextafter(r, 0.0)}) {
      if (b * c == 1.0) return BayesFactorPair{b, c};
    }
    return std::nullopt;
  };
  double up = bf01;
  double down = bf01;
  for (int k = 0; k < 64; ++k) {
    if (auto p = try_pair(up)) return *p;
    if (auto p = try_pair(down)) return *p;
    up = std::nextafter(up, kInf);
    down = std::nextafter(down, 0.0);
  }
  return {bf01, 1.0 / bf01};
}

std::vector<double> default_probs() {
  std::vector<double> probs(99);
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = static_cast<double>(i + 1) / 100.0;
  return probs;
}

QuantileAveragedPosterior average_quantile_vectors(std::span<const std::vector<double>> quantiles,
                                                   std::span<const double> probs) {
  if (quantiles.empty()) throw InvalidInput("quantile_average needs at least one posterior");
  check_probs(probs);
  QuantileAveragedPosterior out;
  out.probs.assign(probs.begin(), probs.end());
  out.avg_quantiles.assign(probs.size(), 0.0);
  for (const auto& q : quantiles) {
    if (q.size() != probs.size()) throw InvalidInput("quantile vector length mismatch");
    for (std::size_t k = 0; k < q.size(); ++k) out.avg_quantiles[k] += q[k];
  }
  for (auto& a : out.avg_quantiles) a /= static_cast<double>(quantiles.size());
  out.replication_count = quantiles.size();
  return out;
}

QuantileAveragedPosterior quantile_average(std::span<const Posterior> posteriors,
                                           std::span<const double> probs) {
  if (posteriors.empty()) throw InvalidInput("quantile_average needs at least one posterior");
  check_probs(probs);
  std::vector<std::vector<double>> quantiles;
  quantiles.reserve(posteriors.size());
  for (const auto& p : posteriors) quantiles.push_back(posterior_quantiles(p, probs));
  return average_quantile_vectors(quantiles, probs);
}

std::vector<double> sample_from_grid(const PosteriorGrid& grid, std::size_t count, Rng& rng) {
  const auto cdf = cumulative_trapezoid(grid);
  std::vector<double> out(count);
  for (auto& v : out) v = invert_cdf(grid.tau_grid, cdf, rng.uniform() * cdf.back());
  return out;
}

}  // namespace ktau
