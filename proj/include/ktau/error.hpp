#pragma once

#include <stdexcept>
#include <string>

namespace ktau {

/// Raised when data or parameters are statistically unusable (too few
/// observations, values outside a support, unreachable copula parameters).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when an MCMC step reaches a state that should be impossible,
/// e.g. an empty truncation interval from a violated ordinal constraint.
class SamplerError : public std::runtime_error {
 public:
  explicit SamplerError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ktau
