#include "betacov/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "betacov/error.hpp"

namespace betacov {

void QuadratureSpec::validate() const {
    if (!(absolute_tolerance > 0.0)) throw DomainError("QuadratureSpec: absolute_tolerance must be > 0");
    if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
    for (const double k : kink_points) {
        if (!std::isfinite(k)) throw DomainError("QuadratureSpec: kink points must be finite");
    }
}

QuadratureSpec QuadratureSpec::with_kinks(std::vector<double> kinks) const {
    QuadratureSpec out = *this;
    out.kink_points.insert(out.kink_points.end(), kinks.begin(), kinks.end());
    std::sort(out.kink_points.begin(), out.kink_points.end());
    out.kink_points.erase(std::unique(out.kink_points.begin(), out.kink_points.end()), out.kink_points.end());
    return out;
}

namespace {

struct Panel {
    const Integrand& f;
    QuadratureResult& result;
    double exhausted = 0.0;

    void refine(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        if (!(a < lm && lm < m && m < rm && rm < b)) {
            // Interval exhausted at double resolution; the panel can hold at
            // most width * max|f| of the integral. These slivers are charged
            // against the top-level tolerance in integrate_panel.
            result.value += whole;
            const double bound = (b - a) * std::max({std::fabs(fa), std::fabs(fm), std::fabs(fb)});
            result.error_estimate += bound;
            exhausted += bound;
            return;
        }
        const double flm = f(lm);
        const double frm = f(rm);
        result.evaluations += 2;
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (std::fabs(delta) <= 15.0 * tol || !std::isfinite(delta)) {
            result.value += left + right + delta / 15.0;
            result.error_estimate += std::fabs(delta) / 15.0;
            if (!std::isfinite(delta)) result.converged = false;
            return;
        }
        if (depth <= 1) {
            result.value += left + right + delta / 15.0;
            result.error_estimate += std::fabs(delta) / 15.0;
            result.converged = false;
            return;
        }
        refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
        refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
};

} // namespace

QuadratureResult integrate_panel(const Integrand& f, double lo, double hi, double f_lo, double f_mid,
                                 double f_hi, double tolerance, int max_depth) {
    QuadratureResult result;
    result.value = 0.0;
    if (lo == hi) return result;
    const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
    Panel panel{f, result};
    panel.refine(lo, hi, f_lo, f_mid, f_hi, whole, tolerance, max_depth);
    if (!(panel.exhausted <= tolerance)) result.converged = false;
    return result;
}

QuadratureResult integrate(const Integrand& f, double lo, double hi, const QuadratureSpec& spec) {
    spec.validate();
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("integrate: bounds must be finite");
    if (lo == hi) return {};
    if (lo > hi) {
        QuadratureResult flipped = integrate(f, hi, lo, spec);
        flipped.value = -flipped.value;
        return flipped;
    }

    std::vector<double> cuts{lo};
    for (const double k : spec.kink_points) {
        if (k > lo && k < hi) cuts.push_back(k);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Panel endpoints are sampled one ulp inside the panel so that a jump at a
    // cut contributes its one-sided limit to each neighbour.
    QuadratureResult total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        const double f_a = f(std::nextafter(a, b));
        const double f_mid = f(0.5 * (a + b));
        const double f_b = f(std::nextafter(b, a));
        const QuadratureResult panel =
            integrate_panel(f, a, b, f_a, f_mid, f_b, spec.absolute_tolerance, spec.max_subdivisions);
        total.value += panel.value;
        total.error_estimate += panel.error_estimate;
        total.converged = total.converged && panel.converged;
        total.evaluations += panel.evaluations + 3;
    }
    return total;
}

double integrate_or_throw(const Integrand& f, double lo, double hi, const QuadratureSpec& spec) {
    const QuadratureResult r = integrate(f, lo, hi, spec);
    if (!r.converged) {
        throw QuadratureFailure("adaptive Simpson exhausted " + std::to_string(spec.max_subdivisions) +
                                    " subdivision levels",
                                r.value, r.error_estimate);
    }
    return r.value;
}

} // namespace betacov
