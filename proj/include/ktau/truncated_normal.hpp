#pragma once

#include "ktau/random.hpp"

namespace ktau {

/// Draw from Normal(mean, sd) restricted to the open interval (lower, upper).
/// Either bound may be infinite. The result lies strictly inside the interval.
///
/// Wide intervals use the inverse CDF, evaluated on the side of zero where
/// the CDF keeps its relative precision. Intervals starting more than six
/// standard deviations into a tail use exponential rejection; very narrow
/// intervals use uniform rejection.
///
/// Throws SamplerError if lower >= upper, InvalidInput if sd <= 0.
double sample_truncated_normal(double mean, double sd, double lower, double upper,
                               Rng& rng);

}  // namespace ktau
