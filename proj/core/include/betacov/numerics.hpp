#pragma once

// Special functions used throughout the library: the standard normal family,
// the regularized incomplete beta function and its inverse, and the standard
// bivariate normal distribution function.

namespace betacov {

/// Standard normal density.
double std_normal_pdf(double x) noexcept;

/// Standard normal distribution function Phi(x). Saturates to 0/1 in the tails.
double std_normal_cdf(double x) noexcept;

/// Upper tail 1 - Phi(x) without cancellation.
double std_normal_sf(double x) noexcept;

/// Phi^{-1}(p) for p in (0,1). Throws DomainError otherwise.
double std_normal_quantile(double p);

/// log B(a, b).
double log_beta(double a, double b);

/// Density of Beta(a, b) at x in [0,1]; returns 0 outside.
double beta_pdf(double x, double a, double b);

/// Regularized incomplete beta I_x(a, b).
///
/// Evaluated by the modified Lentz continued fraction, switching to the
/// reflected form I_x(a,b) = 1 - I_{1-x}(b,a) when x > (a+1)/(a+b+2) so the
/// fraction always converges quickly.
double regularized_incomplete_beta(double x, double a, double b);

/// Inverse of I_x(a, b) in x: returns x with |I_x(a,b) - p| <= 1e-11.
///
/// Newton iteration started from a normal/power-law approximation, kept
/// inside a shrinking bracket so that any rejected step falls back to
/// bisection.
double inverse_incomplete_beta(double p, double a, double b);

/// P(Z1 <= h, Z2 <= k) for a standard bivariate normal with correlation rho.
///
/// Integrates the Plackett identity dPhi2/drho = phi2(h, k; rho) from rho = 0
/// after the substitution rho = sin(theta), which removes the endpoint
/// singularity as |rho| -> 1.
double bivariate_normal_cdf(double h, double k, double rho);

/// Phi2(h, k; rho) - Phi(h) Phi(k), the Plackett integral alone. Avoids the
/// cancellation of subtracting the independent part when rho is small.
double bivariate_normal_excess(double h, double k, double rho);

} // namespace betacov
