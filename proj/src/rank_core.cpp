#include "ktau/rank_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "ktau/error.hpp"

namespace ktau {

PairedSample::PairedSample(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) {
    throw InvalidInput("x and y differ in length (" + std::to_string(x_.size()) + " vs " +
                       std::to_string(y_.size()) + ")");
  }
  if (x_.size() < 2) throw InvalidInput("insufficient data: need at least 2 pairs");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) {
      throw InvalidInput("non-finite value at index " + std::to_string(i));
    }
  }
}

PairedSample PairedSample::mirrored() const {
  std::vector<double> y(y_.size());
  std::transform(y_.begin(), y_.end(), y.begin(), [](double v) { return -v; });
  return PairedSample(x_, std::move(y));
}

int concordance_indicator(double xi, double yi, double xj, double yj) noexcept {
  // Compare signs rather than multiplying; the product can underflow to 0.
  const int sx = (xi > xj) - (xi < xj);
  const int sy = (yi > yj) - (yi < yj);
  return sx * sy;
}

ConcordanceSummary concordance_summary(const PairedSample& s) {
  const auto x = s.x();
  const auto y = s.y();
  const std::size_t n = s.size();
  ConcordanceSummary out;
  out.total_pairs = n * (n - 1) / 2;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      switch (concordance_indicator(x[i], y[i], x[j], y[j])) {
        case 1: ++out.concordant; break;
        case -1: ++out.discordant; break;
        default: ++out.tied; break;
      }
    }
  }
  return out;
}

double kendall_tau_pairwise(const PairedSample& s) {
  const auto c = concordance_summary(s);
  return (static_cast<double>(c.concordant) - static_cast<double>(c.discordant)) /
         static_cast<double>(c.total_pairs);
}

namespace {

// Pairs tied within runs of equal keys along `order`.
template <class Equal>
std::int64_t tied_pairs(const std::vector<std::size_t>& order, Equal equal) {
  std::int64_t total = 0;
  std::int64_t run = 1;
  for (std::size_t k = 1; k <= order.size(); ++k) {
    if (k < order.size() && equal(order[k - 1], order[k])) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

}  // namespace

double kendall_tau_merge(const PairedSample& s) {
  const auto x = s.x();
  const auto y = s.y();
  const std::size_t n = s.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  const std::int64_t x_ties = tied_pairs(order, [&](auto a, auto b) { return x[a] == x[b]; });
  const std::int64_t joint_ties =
      tied_pairs(order, [&](auto a, auto b) { return x[a] == x[b] && y[a] == y[b]; });

  // Bottom-up merge sort on y counting strict inversions (discordant pairs).
  std::vector<std::size_t> buffer(n);
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (y[order[j]] < y[order[i]]) {
          swaps += static_cast<std::int64_t>(mid - i);
          buffer[k++] = order[j++];
        } else {
          buffer[k++] = order[i++];
        }
      }
      while (i < mid) buffer[k++] = order[i++];
      while (j < hi) buffer[k++] = order[j++];
    }
    order.swap(buffer);
  }
  const std::int64_t y_ties = tied_pairs(order, [&](auto a, auto b) { return y[a] == y[b]; });

  const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t untied = total - x_ties - y_ties + joint_ties;
  const std::int64_t numerator = untied - 2 * swaps;
  return static_cast<double>(numerator) / static_cast<double>(total);
}

double kendall_tau(const PairedSample& s) {
  return s.size() <= 64 ? kendall_tau_pairwise(s) : kendall_tau_merge(s);
}

double t_star(double tau, std::size_t n) {
  if (n < 2) throw InvalidInput("insufficient data: t_star needs n >= 2");
  const double nd = static_cast<double>(n);
  return tau * std::sqrt(9.0 * nd * (nd - 1.0) / (4.0 * nd + 10.0));
}

std::vector<double> mid_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace ktau
