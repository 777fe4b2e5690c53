#pragma once

namespace evoset {

/// Standard normal CDF via erfc; exact 0/1 only where the double underflows.
double normal_cdf(double x);

/// Inverse of normal_cdf on [0, 1]; -inf at 0 and +inf at 1.
double normal_quantile(double p);

}  // namespace evoset
