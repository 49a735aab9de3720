#include "betacov/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "betacov/error.hpp"

namespace betacov {

namespace {

std::vector<double> merged_breakpoints(const UnitLaw& a, const UnitLaw& b) {
    std::vector<double> cuts = quadrature_breakpoints(a);
    const std::vector<double> more = quadrature_breakpoints(b);
    cuts.insert(cuts.end(), more.begin(), more.end());
    return cuts;
}

// Probability levels where either quantile function jumps or is flat.
std::vector<double> quantile_breakpoints(const UnitLaw& a, const UnitLaw& b) {
    static constexpr double levels[] = {1e-9, 1e-6, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.25, 0.5,
                                        0.75, 0.9,  0.95, 0.99, 0.999, 1 - 1e-4, 1 - 1e-6, 1 - 1e-9};
    std::vector<double> cuts(std::begin(levels), std::end(levels));
    for (const UnitLaw* law : {&a, &b}) {
        for (const double x : law->kink_points()) {
            cuts.push_back(law->cdf(x));
            cuts.push_back(law->cdf(std::nextafter(x, -1.0)));
        }
    }
    return cuts;
}

} // namespace

std::string_view to_string(W1Method method) noexcept {
    switch (method) {
    case W1Method::cdf_quadrature: return "cdf-quadrature";
    case W1Method::quantile_quadrature: return "quantile-quadrature";
    case W1Method::empirical_exact: return "empirical-exact";
    case W1Method::closed_form: return "closed-form";
    }
    return "unknown";
}

W1Result w1(const UnitLaw& a, const UnitLaw& b, const QuadratureSpec& spec) {
    const QuadratureSpec split = spec.with_kinks(merged_breakpoints(a, b));
    const auto integrand = [&a, &b](double t) { return std::fabs(a.cdf(t) - b.cdf(t)); };
    const QuadratureResult r = integrate(integrand, 0.0, 1.0, split);
    if (!r.converged) {
        throw QuadratureFailure("w1: quadrature did not converge", r.value, r.error_estimate);
    }
    return {std::max(0.0, r.value), r.error_estimate, W1Method::cdf_quadrature};
}

W1Result wp(const UnitLaw& a, const UnitLaw& b, double p, const QuadratureSpec& spec) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("wp: order p must be >= 1");
    const QuadratureSpec split = spec.with_kinks(quantile_breakpoints(a, b));
    const auto integrand = [&a, &b, p](double u) {
        const double d = std::fabs(a.quantile(u) - b.quantile(u));
        return p == 1.0 ? d : std::pow(d, p);
    };
    const QuadratureResult r = integrate(integrand, 0.0, 1.0, split);
    if (!r.converged) {
        throw QuadratureFailure("wp: quadrature did not converge", r.value, r.error_estimate);
    }
    const double integral = std::max(0.0, r.value);
    return {p == 1.0 ? integral : std::pow(integral, 1.0 / p), r.error_estimate, W1Method::quantile_quadrature};
}

TransportMap monotone_map(LawPtr a, LawPtr b) {
    if (!a || !b) throw DomainError("monotone_map: null law");
    if (!a->kink_points().empty()) throw DomainError("monotone_map: source law must have a continuous cdf");
    TransportMap map;
    map.forward = [a, b](double u) { return b->quantile(std::clamp(a->cdf(u), 0.0, 1.0)); };
    map.inverse = [a, b](double z) { return a->quantile(std::clamp(b->cdf(z), 0.0, 1.0)); };
    map.inverse_derivative = [a, b](double z) {
        const auto fb = b->density(z);
        const auto fa = a->density(a->quantile(std::clamp(b->cdf(z), 0.0, 1.0)));
        if (!fb || !fa || *fa <= 0.0) return std::nan("");
        return *fb / *fa;
    };
    return map;
}

W1Result w1_empirical(const EmpiricalLaw& sample, const UnitLaw& b, const QuadratureSpec& spec) {
    spec.validate();
    const std::span<const double> v = sample.values();
    const std::size_t n = v.size();
    const double nd = static_cast<double>(n);

    std::vector<double> q(n + 1);
    for (std::size_t i = 0; i <= n; ++i) q[i] = b.quantile(static_cast<double>(i) / nd);

    QuadratureSpec piece_spec = spec;
    piece_spec.absolute_tolerance = std::max(spec.absolute_tolerance / nd, 1e-17);
    piece_spec.kink_points = b.kink_points();

    double total = 0.0;
    double error = 0.0;
    bool converged = true;
    auto accumulate = [&](const QuadratureResult& r) {
        total += r.value;
        error += r.error_estimate;
        converged = converged && r.converged;
    };

    for (std::size_t i = 1; i <= n; ++i) {
        const double lo = static_cast<double>(i - 1) / nd;
        const double hi = static_cast<double>(i) / nd;
        const double value = v[i - 1];
        const double q_lo = q[i - 1];
        const double q_hi = q[i];

        // Part of the segment where Q_b(p) < v: area between F_b and level lo.
        if (value > q_lo) {
            QuadratureSpec s = piece_spec;
            if (q_hi < value) s.kink_points.push_back(q_hi);
            accumulate(integrate(
                [&b, lo, hi](double x) { return std::max(0.0, std::min(b.cdf(x), hi) - lo); }, q_lo, value, s));
        }
        // Part where Q_b(p) > v: area between level hi and F_b.
        if (q_hi > value) {
            QuadratureSpec s = piece_spec;
            if (q_lo > value) s.kink_points.push_back(q_lo);
            accumulate(integrate(
                [&b, lo, hi](double x) { return std::max(0.0, hi - std::max(b.cdf(x), lo)); }, value, q_hi, s));
        }
    }
    if (!converged) throw QuadratureFailure("w1_empirical: quadrature did not converge", total, error);
    return {std::max(0.0, total), error, W1Method::empirical_exact};
}

double w1_centered_normals(double sigma1, double sigma2) {
    if (!(sigma1 >= 0.0) || !(sigma2 >= 0.0)) throw DomainError("w1_centered_normals: sigmas must be >= 0");
    return std::sqrt(2.0 / std::numbers::pi) * std::fabs(sigma1 - sigma2);
}

double mean_gap(const UnitLaw& a, const UnitLaw& b) { return std::fabs(a.mean() - b.mean()); }

McEstimate coupling_mc_bound(const TransportMap& map, const UnitLaw& base, double p, long sims,
                             RngStream stream) {
    if (sims < 1) throw DomainError("coupling_mc_bound: sims must be >= 1");
    if (!(p >= 1.0)) throw DomainError("coupling_mc_bound: order p must be >= 1");
    UniformStream rng(stream);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long s = 0; s < sims; ++s) {
        const double x = base.quantile(rng.next());
        const double d = std::pow(std::fabs(x - map(x)), p);
        sum += d;
        sum_sq += d * d;
    }
    const double m = sum / static_cast<double>(sims);
    const double var =
        sims > 1 ? std::max(0.0, (sum_sq - static_cast<double>(sims) * m * m) / static_cast<double>(sims - 1)) : 0.0;
    const double se_m = std::sqrt(var / static_cast<double>(sims));
    if (p == 1.0) return {m, se_m};
    const double value = std::pow(m, 1.0 / p);
    // Delta method for m^(1/p).
    const double se = m > 0.0 ? se_m * value / (p * m) : 0.0;
    return {value, se};
}

} // namespace betacov
