#pragma once

#include <memory>

#include "betacov/quadrature.hpp"
#include "betacov/transport_map.hpp"
#include "betacov/unit_laws.hpp"

namespace betacov {

/// Test-to-calibration scale ratio r = sigma_test / sigma_cal for half-normal
/// (absolute-residual) scores. r > 1 undercovers, r < 1 overcovers.
class ScaleShift {
public:
    explicit ScaleShift(double r);

    double ratio() const noexcept { return r_; }
    ScaleShift inverse() const { return ScaleShift(1.0 / r_); }

private:
    double r_;
};

/// q(u) = Phi^{-1}((u+1)/2), the half-normal quantile at coverage u.
double q_map(double u);

/// h_r(u) = 2 Phi(q(u)/r) - 1: realized coverage under shift r of a threshold
/// that covers u under the calibration law.
double h_map(double u, const ScaleShift& shift);

/// h_r^{-1}(z) = 2 Phi(r q(z)) - 1 = h_{1/r}(z).
double h_inverse(double z, const ScaleShift& shift);

/// d/dz h_r^{-1}(z) = r phi(r q(z)) / phi(q(z)).
double h_inverse_derivative(double z, const ScaleShift& shift);

TransportMap halfnormal_map(const ScaleShift& shift);

/// (h_r)_# beta_{n,k}.
std::shared_ptr<const PushforwardLaw> transported_law(long n, long k, const ScaleShift& shift);

/// Density of h_r(B), B ~ beta_{n,k}.
double transported_density(double z, const ScaleShift& shift, long n, long k);

/// Cov(k) = E[h_r(B_{n,k})] by quadrature against the beta density.
double shifted_coverage(long n, long k, const ScaleShift& shift, const QuadratureSpec& spec = {});

struct ShiftIdentity {
    double w1 = 0.0;         ///< W1((h_r)_# beta, beta) by cdf quadrature
    double gap = 0.0;        ///< |Cov(k) - k/(n+1)|
    double coverage = 0.0;   ///< Cov(k)
};

/// Computes both sides of W1 = |Cov(k) - k/(n+1)| independently and throws
/// IdentityViolation if they differ by more than 1e-7. The identity holds
/// because h_r - id has constant sign, so the monotone coupling moves every
/// point in the same direction.
ShiftIdentity exact_w1_identity(long n, long k, const ScaleShift& shift, const QuadratureSpec& spec = {});

/// 2 phi(q(gamma)) q(gamma).
double local_shift_coefficient(double gamma);

/// First-order coverage change -2 delta phi(q(gamma)) q(gamma) for r = e^delta.
/// Omits the O(delta^2) + O(1/n) remainder.
double local_shift_gap(double gamma, double delta);

} // namespace betacov
