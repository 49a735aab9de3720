#include "betacov/halfnormal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "betacov/error.hpp"
#include "betacov/numerics.hpp"
#include "betacov/transport.hpp"

namespace betacov {

namespace {

constexpr double kEdge = 1e-15;

double clamp_coverage(double u) { return std::clamp(u, kEdge, 1.0 - kEdge); }

void require_open_unit(double u, const char* what) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError(what);
}

// q on the clamped range; Phi^{-1} is taken from whichever tail keeps the
// argument away from 1.
double q_clamped(double u) {
    u = clamp_coverage(u);
    if (u < 0.5) return std_normal_quantile(0.5 + 0.5 * u);
    return -std_normal_quantile(0.5 * (1.0 - u));
}

// 2 Phi(x) - 1 for x >= 0.
double two_phi_minus_one(double x) { return std::erf(x / std::numbers::sqrt2); }

} // namespace

ScaleShift::ScaleShift(double r) : r_(r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("ScaleShift: ratio must be positive and finite");
}

double q_map(double u) {
    require_open_unit(u, "q_map: u must lie in (0,1)");
    return q_clamped(u);
}

double h_map(double u, const ScaleShift& shift) {
    require_open_unit(u, "h_map: u must lie in (0,1)");
    if (shift.ratio() == 1.0) return u;
    return two_phi_minus_one(q_clamped(u) / shift.ratio());
}

double h_inverse(double z, const ScaleShift& shift) { return h_map(z, shift.inverse()); }

double h_inverse_derivative(double z, const ScaleShift& shift) {
    require_open_unit(z, "h_inverse_derivative: z must lie in (0,1)");
    const double r = shift.ratio();
    const double q = q_clamped(z);
    // r phi(r q) / phi(q)
    return r * std::exp(-0.5 * (r * r - 1.0) * q * q);
}

TransportMap halfnormal_map(const ScaleShift& shift) {
    const auto endpoint_safe = [](double (*fn)(double, const ScaleShift&), ScaleShift s) {
        return [fn, s](double u) {
            if (u <= 0.0) return 0.0;
            if (u >= 1.0) return 1.0;
            return fn(u, s);
        };
    };
    TransportMap map;
    map.forward = endpoint_safe(&h_map, shift);
    map.inverse = endpoint_safe(&h_inverse, shift);
    map.inverse_derivative = [shift](double z) {
        return h_inverse_derivative(std::clamp(z, kEdge, 1.0 - kEdge), shift);
    };
    return map;
}

std::shared_ptr<const PushforwardLaw> transported_law(long n, long k, const ScaleShift& shift) {
    return pushforward(beta_reference(n, k), halfnormal_map(shift));
}

double transported_density(double z, const ScaleShift& shift, long n, long k) {
    require_open_unit(z, "transported_density: z must lie in (0,1)");
    if (k < 1 || k > n) throw DomainError("transported_density: requires 1 <= k <= n");
    const double u = h_inverse(z, shift);
    return beta_pdf(u, static_cast<double>(k), static_cast<double>(n + 1 - k)) * h_inverse_derivative(z, shift);
}

double shifted_coverage(long n, long k, const ScaleShift& shift, const QuadratureSpec& spec) {
    if (k < 1 || k > n) throw DomainError("shifted_coverage: requires 1 <= k <= n");
    const auto reference = beta_reference(n, k);
    if (shift.ratio() == 1.0) return reference->mean();
    const double a = reference->shape_a();
    const double b = reference->shape_b();
    const QuadratureSpec split = spec.with_kinks(quadrature_breakpoints(*reference));
    const auto integrand = [&](double u) {
        if (u <= 0.0 || u >= 1.0) return 0.0;
        return h_map(u, shift) * beta_pdf(u, a, b);
    };
    return integrate_or_throw(integrand, 0.0, 1.0, split);
}

ShiftIdentity exact_w1_identity(long n, long k, const ScaleShift& shift, const QuadratureSpec& spec) {
    const auto reference = beta_reference(n, k);
    const auto moved = transported_law(n, k, shift);
    ShiftIdentity out;
    out.w1 = w1(*moved, *reference, spec).distance;
    out.coverage = shifted_coverage(n, k, shift, spec);
    out.gap = std::fabs(out.coverage - reference->mean());
    if (std::fabs(out.w1 - out.gap) > 1e-7) {
        throw IdentityViolation("half-normal W1 identity failed: w1 = " + std::to_string(out.w1) +
                                ", gap = " + std::to_string(out.gap));
    }
    return out;
}

double local_shift_coefficient(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("local_shift_coefficient: gamma must lie in (0,1)");
    const double q = q_map(gamma);
    return 2.0 * std_normal_pdf(q) * q;
}

double local_shift_gap(double gamma, double delta) {
    if (!std::isfinite(delta)) throw DomainError("local_shift_gap: delta must be finite");
    return -delta * local_shift_coefficient(gamma);
}

} // namespace betacov
