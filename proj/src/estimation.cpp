#include "ktau/estimation.hpp"

namespace ktau {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::original: return "original";
    case Method::enhanced: return "enhanced";
    case Method::latent: return "latent";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (auto m : {Method::original, Method::enhanced, Method::latent}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

Estimate estimate(const PairedSample& s, Method method, const EstimateOptions& options) {
  Estimate out;
  out.method = method;
  out.n = s.size();
  out.tau_obs = kendall_tau(s);
  switch (method) {
    case Method::original:
    case Method::enhanced: {
      const auto grid_method = method == Method::original ? GridMethod::original_asymptotic
                                                          : GridMethod::enhanced_asymptotic;
      out.posterior = asymptotic_posterior(out.tau_obs, out.n, grid_method, cosine_prior(),
                                           options.grid_size);
      break;
    }
    case Method::latent:
      out.posterior = run_chain(s, options.chain);
      break;
  }
  out.summary = summarize(out.posterior, options.ci_level);
  out.bf01 = savage_dickey_bf01(out.posterior, cosine_prior());
  return out;
}

}  // namespace ktau
