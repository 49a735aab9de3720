#pragma once

#include <string_view>

#include "betacov/quadrature.hpp"
#include "betacov/rng.hpp"
#include "betacov/transport_map.hpp"
#include "betacov/unit_laws.hpp"

namespace betacov {

enum class W1Method { cdf_quadrature, quantile_quadrature, empirical_exact, closed_form };

std::string_view to_string(W1Method method) noexcept;

struct W1Result {
    double distance = 0.0;
    double achieved_tolerance = 0.0;
    W1Method method = W1Method::cdf_quadrature;
};

/// Monte Carlo estimate with its standard error.
struct McEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

/// W1 as the integral of |F_a - F_b| over [0,1].
///
/// The interval is cut at every kink of either law and at a spread of their
/// quantiles before adaptive refinement. Throws QuadratureFailure if the
/// integrator does not converge.
W1Result w1(const UnitLaw& a, const UnitLaw& b, const QuadratureSpec& spec = {});

/// W_p via the quantile coupling: (integral of |Q_a(u) - Q_b(u)|^p du)^(1/p).
W1Result wp(const UnitLaw& a, const UnitLaw& b, double p, const QuadratureSpec& spec = {});

/// The monotone (optimal) map Q_b o F_a. Requires a continuous cdf for `a`.
TransportMap monotone_map(LawPtr a, LawPtr b);

/// W1 between a sample and a law, summed over the N quantile segments
/// ((i-1)/N, i/N] on which the sample quantile equals v_i.
///
/// Each segment integral of |v_i - Q_b(p)| is split at p* = F_b(v_i) and
/// rewritten through the Galois relation Q_b(p) <= x <=> p <= F_b(x) as an
/// integral of F_b over the short x-range between v_i and Q_b at the segment
/// ends, which is then computed by adaptive quadrature. This avoids
/// integrating Q_b itself, whose derivative is unbounded at p = 0 and 1.
W1Result w1_empirical(const EmpiricalLaw& sample, const UnitLaw& b, const QuadratureSpec& spec = {});

/// W1(N(0, s1^2), N(0, s2^2)) = sqrt(2/pi) |s1 - s2|.
double w1_centered_normals(double sigma1, double sigma2);

/// |mean(a) - mean(b)|, a lower bound for W1 (identity test function).
double mean_gap(const UnitLaw& a, const UnitLaw& b);

/// Monte Carlo estimate of (E|X - map(X)|^p)^(1/p) with X ~ base drawn by
/// inversion. Any coupling upper-bounds W_p, so this is an upper bound in
/// expectation; for the monotone map it estimates W_p itself.
McEstimate coupling_mc_bound(const TransportMap& map, const UnitLaw& base, double p, long sims,
                             RngStream stream);

} // namespace betacov
