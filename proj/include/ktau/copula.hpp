#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ktau/rank_core.hpp"

namespace ktau {

enum class CopulaFamily { clayton, gumbel, frank, gaussian };
enum class Marginal { uniform, std_normal, exponential_rate1, heavy_tail_t3 };

std::string_view to_string(CopulaFamily f) noexcept;
std::string_view to_string(Marginal m) noexcept;
std::optional<CopulaFamily> parse_family(std::string_view name) noexcept;
std::optional<Marginal> parse_marginal(std::string_view name) noexcept;

struct CopulaSpec {
  CopulaFamily family = CopulaFamily::gaussian;
  double tau = 0.0;
  Marginal marginal = Marginal::uniform;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Family-native dependence parameter. For the Gaussian family theta is the
/// correlation.
struct CopulaParameter {
  CopulaFamily family = CopulaFamily::gaussian;
  double theta = 0.0;
};

/// Order-one Debye function (1/x) int_0^x t / (e^t - 1) dt; D1(0) = 1.
double debye1(double x);

/// Frank's tau(theta) = 1 + 4 (D1(theta) - 1) / theta, odd in theta.
double frank_tau(double theta);

/// Throws InvalidInput("tau unreachable for family ...") outside the
/// family's range or for tau == 0, which is the independence copula.
CopulaParameter tau_to_parameter(CopulaFamily family, double tau);

/// Throws InvalidInput when theta is outside the family's domain.
double parameter_to_tau(const CopulaParameter& p);

/// Raw draws on the unit square, before any marginal transform.
struct UnitSample {
  std::vector<double> u;
  std::vector<double> v;
};

UnitSample sample_copula_uniform(const CopulaSpec& spec);

/// Copula draws pushed through the marginal's quantile function.
PairedSample sample_copula(const CopulaSpec& spec);

double apply_marginal(Marginal m, double u);

}  // namespace ktau
