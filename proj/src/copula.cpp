#include "ktau/copula.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ktau/error.hpp"
#include "ktau/normal.hpp"
#include "ktau/random.hpp"

namespace ktau {

std::string_view to_string(CopulaFamily f) noexcept {
  switch (f) {
    case CopulaFamily::clayton: return "clayton";
    case CopulaFamily::gumbel: return "gumbel";
    case CopulaFamily::frank: return "frank";
    case CopulaFamily::gaussian: return "gaussian";
  }
  return "unknown";
}

std::string_view to_string(Marginal m) noexcept {
  switch (m) {
    case Marginal::uniform: return "uniform";
    case Marginal::std_normal: return "std_normal";
    case Marginal::exponential_rate1: return "exponential_rate1";
    case Marginal::heavy_tail_t3: return "heavy_tail_t3";
  }
  return "unknown";
}

std::optional<CopulaFamily> parse_family(std::string_view name) noexcept {
  for (auto f : {CopulaFamily::clayton, CopulaFamily::gumbel, CopulaFamily::frank,
                 CopulaFamily::gaussian}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

std::optional<Marginal> parse_marginal(std::string_view name) noexcept {
  for (auto m : {Marginal::uniform, Marginal::std_normal, Marginal::exponential_rate1,
                 Marginal::heavy_tail_t3}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

double debye1(double x) {
  if (x == 0.0) return 1.0;
  auto integrand = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, x, 20, 1e-14, &error);
  return integral / x;
}

double frank_tau(double theta) {
  if (theta == 0.0) return 0.0;
  return 1.0 + 4.0 * (debye1(theta) - 1.0) / theta;
}

namespace {

[[noreturn]] void unreachable_tau(CopulaFamily family, double tau) {
  throw InvalidInput("tau unreachable for family " + std::string(to_string(family)) + ": " +
                     std::to_string(tau));
}

// Smallest positive theta with frank_tau(theta) = tau, tau in (0, 1).
double solve_frank(double tau) {
  double lo = 0.0;
  double hi = 1.0;
  while (frank_tau(hi) < tau) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) unreachable_tau(CopulaFamily::frank, tau);
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (frank_tau(mid) < tau ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CopulaParameter tau_to_parameter(CopulaFamily family, double tau) {
  if (!(std::abs(tau) < 1.0)) unreachable_tau(family, tau);
  switch (family) {
    case CopulaFamily::clayton:
      if (!(tau > 0.0)) unreachable_tau(family, tau);
      return {family, 2.0 * tau / (1.0 - tau)};
    case CopulaFamily::gumbel:
      if (tau < 0.0) unreachable_tau(family, tau);
      return {family, 1.0 / (1.0 - tau)};
    case CopulaFamily::frank: {
      if (tau == 0.0) unreachable_tau(family, tau);
      const double theta = solve_frank(std::abs(tau));
      return {family, tau < 0.0 ? -theta : theta};
    }
    case CopulaFamily::gaussian:
      return {family, std::sin(std::numbers::pi * tau / 2.0)};
  }
  unreachable_tau(family, tau);
}

double parameter_to_tau(const CopulaParameter& p) {
  const double t = p.theta;
  switch (p.family) {
    case CopulaFamily::clayton:
      if (!(t > 0.0)) break;
      return t / (t + 2.0);
    case CopulaFamily::gumbel:
      if (!(t >= 1.0)) break;
      return 1.0 - 1.0 / t;
    case CopulaFamily::frank:
      if (t == 0.0 || !std::isfinite(t)) break;
      return frank_tau(t);
    case CopulaFamily::gaussian:
      if (!(std::abs(t) < 1.0)) break;
      return 2.0 / std::numbers::pi * std::asin(t);
  }
  throw InvalidInput("parameter outside the domain of " + std::string(to_string(p.family)));
}

namespace {

constexpr double kUnitLow = 0x1p-60;
constexpr double kUnitHigh = 1.0 - 0x1p-53;

double clamp_unit(double u) { return std::min(std::max(u, kUnitLow), kUnitHigh); }

// Positive stable variate with Laplace transform exp(-s^alpha), 0 < alpha < 1
// (Kanter's representation).
double positive_stable(double alpha, Rng& rng) {
  const double angle = std::numbers::pi * rng.uniform();
  const double w = rng.exponential();
  return std::sin(alpha * angle) / std::pow(std::sin(angle), 1.0 / alpha) *
         std::pow(std::sin((1.0 - alpha) * angle) / w, (1.0 - alpha) / alpha);
}

}  // namespace

UnitSample sample_copula_uniform(const CopulaSpec& spec) {
  UnitSample out;
  out.u.resize(spec.n);
  out.v.resize(spec.n);
  Rng rng(spec.seed);

  if (spec.tau == 0.0) {
    for (std::size_t i = 0; i < spec.n; ++i) {
      out.u[i] = clamp_unit(rng.uniform());
      out.v[i] = clamp_unit(rng.uniform());
    }
    return out;
  }

  const CopulaParameter p = tau_to_parameter(spec.family, spec.tau);
  const double theta = p.theta;
  for (std::size_t i = 0; i < spec.n; ++i) {
    double u = 0.0;
    double v = 0.0;
    switch (spec.family) {
      case CopulaFamily::gaussian: {
        const double z1 = rng.normal();
        const double z2 = theta * z1 + std::sqrt((1.0 - theta) * (1.0 + theta)) * rng.normal();
        u = normal_cdf(z1);
        v = normal_cdf(z2);
        break;
      }
      case CopulaFamily::clayton: {
        // Gamma frailty: psi(s) = (1 + s)^(-1/theta).
        const double frailty = rng.gamma(1.0 / theta);
        u = std::exp(-std::log1p(rng.exponential() / frailty) / theta);
        v = std::exp(-std::log1p(rng.exponential() / frailty) / theta);
        break;
      }
      case CopulaFamily::gumbel: {
        // Positive stable frailty: psi(s) = exp(-s^(1/theta)).
        const double alpha = 1.0 / theta;
        const double frailty = alpha < 1.0 ? positive_stable(alpha, rng) : 1.0;
        u = std::exp(-std::pow(rng.exponential() / frailty, alpha));
        v = std::exp(-std::pow(rng.exponential() / frailty, alpha));
        break;
      }
      case CopulaFamily::frank: {
        u = rng.uniform();
        const double w = rng.uniform();
        v = -std::log1p(w * std::expm1(-theta) / (w + (1.0 - w) * std::exp(-theta * u))) /
            theta;
        break;
      }
    }
    out.u[i] = clamp_unit(u);
    out.v[i] = clamp_unit(v);
  }
  return out;
}

double apply_marginal(Marginal m, double u) {
  switch (m) {
    case Marginal::uniform: return u;
    case Marginal::std_normal: return normal_quantile(u);
    case Marginal::exponential_rate1: return -std::log1p(-u);
    case Marginal::heavy_tail_t3: {
      static const boost::math::students_t_distribution<double> t3(3.0);
      return boost::math::quantile(t3, u);
    }
  }
  return u;
}

PairedSample sample_copula(const CopulaSpec& spec) {
  auto unit = sample_copula_uniform(spec);
  for (auto& u : unit.u) u = apply_marginal(spec.marginal, u);
  for (auto& v : unit.v) v = apply_marginal(spec.marginal, v);
  return PairedSample(std::move(unit.u), std::move(unit.v));
}

}  // namespace ktau
