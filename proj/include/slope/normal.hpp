#pragma once

namespace slope {

/// Standard normal CDF, Phi(x) = P(Z <= x).
double norm_cdf(double x);

/// Standard normal quantile Phi^{-1}(alpha) for alpha in (0, 1).
///
/// Rational initial approximation refined by one Halley step on the
/// complementary error function; |Phi(result) - alpha| <= 1e-12 and the
/// result is accurate to about 1e-9 relative over alpha in
/// [1e-15, 1 - 1e-15]. Throws std::domain_error outside (0, 1).
double inv_norm_cdf(double alpha);

}  // namespace slope
