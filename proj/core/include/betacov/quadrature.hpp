#pragma once

#include <functional>
#include <vector>

namespace betacov {

/// Tolerance and splitting controls for adaptive Simpson integration.
struct QuadratureSpec {
    double absolute_tolerance = 1e-10;
    int max_subdivisions = 60;   ///< recursion depth limit per panel
    std::vector<double> kink_points;   ///< where the integrand may be non-smooth

    /// Throws DomainError unless tolerance > 0, depth >= 1.
    void validate() const;

    QuadratureSpec with_kinks(std::vector<double> kinks) const;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;   ///< summed |S2 - S1|/15 over accepted panels
    bool converged = true;
    int evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Adaptive composite Simpson on [lo, hi].
///
/// The interval is first cut at every kink point inside (lo, hi); each panel
/// is then refined until the Richardson estimate meets the panel tolerance.
/// Never throws on non-convergence: `converged` is false and `value` holds the
/// best estimate.
QuadratureResult integrate(const Integrand& f, double lo, double hi, const QuadratureSpec& spec = {});

/// integrate() that throws QuadratureFailure on non-convergence.
double integrate_or_throw(const Integrand& f, double lo, double hi, const QuadratureSpec& spec = {});

/// Adaptive Simpson on a single panel whose endpoint and midpoint values are
/// already known. Used by callers that integrate many adjacent panels and can
/// share endpoint evaluations.
QuadratureResult integrate_panel(const Integrand& f, double lo, double hi,
                                 double f_lo, double f_mid, double f_hi,
                                 double tolerance, int max_depth);

} // namespace betacov
