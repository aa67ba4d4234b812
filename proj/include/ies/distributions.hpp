#pragma once

namespace ies {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse of the standard normal CDF for p in (0, 1). Rational initial
/// approximation followed by one Halley step; absolute error is near machine
/// precision over the whole range.
double normal_quantile(double p);

}  // namespace ies
