#include "betacov/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "betacov/error.hpp"
#include "betacov/quadrature.hpp"

namespace betacov {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

// Stirling remainder log Gamma(x) - [(x-1/2) log x - x + log sqrt(2 pi)], x >= 8.
double stirling_remainder(double x) {
    const double r = 1.0 / x;
    const double r2 = r * r;
    return r * (1.0 / 12.0 -
                r2 * (1.0 / 360.0 -
                      r2 * (1.0 / 1260.0 -
                            r2 * (1.0 / 1680.0 -
                                  r2 * (1.0 / 1188.0 -
                                        r2 * (691.0 / 360360.0 - r2 * (1.0 / 156.0 - r2 * 3617.0 / 122400.0)))))));
}

// x^a (1-x)^b / B(a, b), with the large-parameter case arranged so that the
// O(a log a) terms cancel analytically instead of numerically.
double beta_prefactor(double x, double a, double b) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double y = 1.0 - x;
    if (a >= 8.0 && b >= 8.0) {
        const double s = a + b;
        const double la = std::log1p((s * x - a) / a);
        const double lb = std::log1p((a - s * x) / b);
        const double correction =
            stirling_remainder(a) + stirling_remainder(b) - stirling_remainder(s);
        return std::exp(a * la + b * lb + 0.5 * std::log(a * b / s) - kLogSqrt2Pi - correction);
    }
    return std::exp(a * std::log(x) + b * std::log(y) - log_beta(a, b));
}

// Continued fraction for I_x(a,b) (modified Lentz). Converges rapidly for
// x < (a+1)/(a+b+2).
double beta_continued_fraction(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    constexpr int max_iterations = 5000;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) return h;
    }
    return h;
}

void require_shapes(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("beta shape parameters must be positive and finite");
    }
}

} // namespace

double std_normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double std_normal_sf(double x) noexcept { return 0.5 * std::erfc(x * std::numbers::sqrt2 / 2.0); }

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p must lie in (0,1)");

    // Wichura, Algorithm AS 241 (PPND16), relative accuracy about 1e-16.
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            ((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
                4.5921953931549871457e+4) * r + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0;
        const double den =
            ((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
                2.1213794301586595867e+4) * r + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0;
        return q * num / den;
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                1.27045825245236838258e+0) * r + 3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
             4.63033784615654529590e+0) * r + 1.42343711074968357734e+0;
        const double den =
            ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
             2.05319162663775882187e+0) * r + 1.0;
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
             5.46378491116411436990e+0) * r + 6.65790464350110377720e+0;
        const double den =
            ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
             5.99832206555887937690e-1) * r + 1.0;
        value = num / den;
    }
    return q < 0.0 ? -value : value;
}

double log_beta(double a, double b) {
    require_shapes(a, b);
    if (a >= 8.0 && b >= 8.0) {
        const double s = a + b;
        // (a-1/2) log(a/s) + (b-1/2) log(b/s) + log sqrt(2 pi / s) + remainders
        return (a - 0.5) * std::log(a / s) + (b - 0.5) * std::log(b / s) + kLogSqrt2Pi - 0.5 * std::log(s) +
               stirling_remainder(a) + stirling_remainder(b) - stirling_remainder(s);
    }
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double beta_pdf(double x, double a, double b) {
    require_shapes(a, b);
    if (x < 0.0 || x > 1.0) return 0.0;
    if (x == 0.0) {
        if (a < 1.0) return std::numeric_limits<double>::infinity();
        return a == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
    }
    if (x == 1.0) {
        if (b < 1.0) return std::numeric_limits<double>::infinity();
        return b == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
    }
    return beta_prefactor(x, a, b) / (x * (1.0 - x));
}

double regularized_incomplete_beta(double x, double a, double b) {
    require_shapes(a, b);
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("regularized_incomplete_beta: x must lie in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return beta_prefactor(x, a, b) * beta_continued_fraction(x, a, b) / a;
    }
    const double y = 1.0 - x;
    return 1.0 - beta_prefactor(y, b, a) * beta_continued_fraction(y, b, a) / b;
}

double inverse_incomplete_beta(double p, double a, double b) {
    require_shapes(a, b);
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("inverse_incomplete_beta: p must lie in [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;

    double x;
    if (a >= 1.0 && b >= 1.0) {
        // Normal approximation (Abramowitz & Stegun 26.5.22).
        const double pp = p < 0.5 ? p : 1.0 - p;
        const double t = std::sqrt(-2.0 * std::log(pp));
        double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if (p < 0.5) z = -z;
        const double al = (z * z - 3.0) / 6.0;
        const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
        const double w = z * std::sqrt(al + h) / h -
                         (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
        x = a / (a + b * std::exp(2.0 * w));
    } else {
        // Power-law tails near 0 and 1.
        const double lna = std::log(a / (a + b));
        const double lnb = std::log(b / (a + b));
        const double t = std::exp(a * lna) / a;
        const double u = std::exp(b * lnb) / b;
        const double w = t + u;
        x = p < t / w ? std::pow(a * w * p, 1.0 / a) : 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
    }
    if (!(x > 0.0 && x < 1.0)) x = 0.5;

    double lo = 0.0;
    double hi = 1.0;
    constexpr double target = 1e-14;
    for (int iteration = 0; iteration < 300; ++iteration) {
        const double err = regularized_incomplete_beta(x, a, b) - p;
        if (std::fabs(err) <= target) return x;
        if (err > 0.0) hi = x; else lo = x;
        if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(x, 1e-300)) return x;

        const double density = beta_pdf(x, a, b);
        double next = 0.5 * (lo + hi);
        if (density > 0.0 && std::isfinite(density)) {
            const double newton = err / density;
            // Halley correction from d/dx log f = (a-1)/x - (b-1)/(1-x).
            const double curvature = (a - 1.0) / x - (b - 1.0) / (1.0 - x);
            const double denom = 1.0 - 0.5 * std::min(1.0, newton * curvature);
            const double candidate = x - newton / denom;
            if (candidate > lo && candidate < hi) next = candidate;
        }
        x = next;
    }
    return x;
}

double bivariate_normal_excess(double h, double k, double rho) {
    if (!(std::fabs(rho) < 1.0)) throw DomainError("bivariate_normal_cdf: |rho| must be < 1");
    if (!std::isfinite(h) || !std::isfinite(k)) throw DomainError("bivariate_normal_cdf: h, k must be finite");
    if (rho == 0.0) return 0.0;
    // h^2 - 2hk s + k^2 = (h-k)^2 + 2hk(1-s) = (h+k)^2 - 2hk(1+s), so the
    // exponent over 2(1-s^2) splits into a term that is finite at s = +-1.
    const double diff2 = (h - k) * (h - k);
    const double sum2 = (h + k) * (h + k);
    const double hk = h * k;
    const Integrand integrand = [diff2, sum2, hk](double theta) {
        const double s = std::sin(theta);
        const double c2 = (1.0 - s) * (1.0 + s);
        double exponent;
        if (s >= 0.0) {
            exponent = hk / (1.0 + s) + (diff2 > 0.0 ? diff2 / (2.0 * c2) : 0.0);
        } else {
            exponent = -hk / (1.0 - s) + (sum2 > 0.0 ? sum2 / (2.0 * c2) : 0.0);
        }
        return std::exp(-exponent) / (2.0 * std::numbers::pi);
    };
    QuadratureSpec spec;
    spec.absolute_tolerance = 1e-14;
    spec.max_subdivisions = 50;
    return integrate(integrand, 0.0, std::asin(rho), spec).value;
}

double bivariate_normal_cdf(double h, double k, double rho) {
    const double excess = bivariate_normal_excess(h, k, rho);
    return std::clamp(std_normal_cdf(h) * std_normal_cdf(k) + excess, 0.0, 1.0);
}

} // namespace betacov
