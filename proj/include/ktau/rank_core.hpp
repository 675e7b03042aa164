#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ktau {

/// Two equal-length vectors of finite scores observed on the same n units.
class PairedSample {
 public:
  /// Throws InvalidInput if lengths differ, n < 2, or any entry is not finite.
  PairedSample(std::vector<double> x, std::vector<double> y);

  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> y() const noexcept { return y_; }
  std::size_t size() const noexcept { return x_.size(); }

  /// Same sample with y negated (mirrors every concordance).
  PairedSample mirrored() const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

struct ConcordanceSummary {
  std::size_t concordant = 0;
  std::size_t discordant = 0;
  std::size_t tied = 0;
  std::size_t total_pairs = 0;
};

/// +1 for a concordant pair, -1 for a discordant one, 0 when either
/// coordinate is tied.
int concordance_indicator(double xi, double yi, double xj, double yj) noexcept;

ConcordanceSummary concordance_summary(const PairedSample& s);

/// Kendall's tau-a: (concordant - discordant) / (n(n-1)/2). Tied pairs add
/// nothing to the numerator and stay in the denominator. Uses the
/// O(n log n) merge-sort count above a small size; the result is exactly
/// the pairwise one since both reduce to the same integer counts.
double kendall_tau(const PairedSample& s);

/// Direct O(n^2) pair enumeration.
double kendall_tau_pairwise(const PairedSample& s);

/// Knight's O(n log n) algorithm, tau-a normalization.
double kendall_tau_merge(const PairedSample& s);

/// Standardized statistic tau * sqrt(9n(n-1) / (4n+10)).
double t_star(double tau, std::size_t n);

/// Mid-ranks (1-based, ties averaged).
std::vector<double> mid_ranks(std::span<const double> values);

}  // namespace ktau
