#include "betacov/unit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "betacov/error.hpp"
#include "betacov/numerics.hpp"

namespace betacov {

namespace {

void require_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError(what);
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

} // namespace

// ---------------------------------------------------------------------------
// BetaLaw

BetaLaw::BetaLaw(long n, long k) : n_(n), k_(k) {
    if (n < 1) throw DomainError("BetaLaw: n must be >= 1");
    if (k < 1) throw DomainError("BetaLaw: k must be >= 1");
}

double BetaLaw::cdf(double t) const {
    if (t < 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    if (degenerate()) return 0.0;
    return regularized_incomplete_beta(t, shape_a(), shape_b());
}

double BetaLaw::quantile(double p) const {
    require_unit(p, "BetaLaw::quantile: p must lie in [0,1]");
    if (degenerate()) return 1.0;
    return inverse_incomplete_beta(p, shape_a(), shape_b());
}

double BetaLaw::mean() const {
    if (degenerate()) return 1.0;
    return static_cast<double>(k_) / static_cast<double>(n_ + 1);
}

std::optional<double> BetaLaw::density(double t) const {
    if (degenerate()) return std::nullopt;
    return beta_pdf(t, shape_a(), shape_b());
}

std::vector<double> BetaLaw::kink_points() const {
    if (degenerate()) return {1.0};
    return {};
}

// ---------------------------------------------------------------------------
// PointMassLaw

PointMassLaw::PointMassLaw(double location) : location_(location) {
    require_unit(location, "PointMassLaw: location must lie in [0,1]");
}

// ---------------------------------------------------------------------------
// PushforwardLaw

PushforwardLaw::PushforwardLaw(LawPtr base, TransportMap map) : base_(std::move(base)), map_(std::move(map)) {
    if (!base_) throw DomainError("PushforwardLaw: null base law");
    if (!map_.forward || !map_.inverse) throw DomainError("PushforwardLaw: map needs forward and inverse");

    QuadratureSpec spec;
    spec.absolute_tolerance = 1e-12;
    spec = spec.with_kinks(quadrature_breakpoints(*this));
    mean_ = integrate([this](double t) { return 1.0 - cdf(t); }, 0.0, 1.0, spec).value;
}

double PushforwardLaw::cdf(double t) const {
    if (t < 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return base_->cdf(clamp_unit(map_.inverse(t)));
}

double PushforwardLaw::quantile(double p) const {
    require_unit(p, "PushforwardLaw::quantile: p must lie in [0,1]");
    return clamp_unit(map_.forward(base_->quantile(p)));
}

std::optional<double> PushforwardLaw::density(double z) const {
    if (!map_.inverse_derivative) return std::nullopt;
    if (z <= 0.0 || z >= 1.0) return 0.0;
    const double u = map_.inverse(z);
    const auto base_density = base_->density(u);
    if (!base_density) return std::nullopt;
    return *base_density * std::fabs(map_.inverse_derivative(z));
}

std::vector<double> PushforwardLaw::kink_points() const {
    std::vector<double> out;
    for (const double k : base_->kink_points()) out.push_back(clamp_unit(map_.forward(k)));
    return out;
}

// ---------------------------------------------------------------------------
// ContaminatedLaw

ContaminatedLaw::ContaminatedLaw(LawPtr base, double pi, double c) : base_(std::move(base)), pi_(pi), c_(c) {
    if (!base_) throw DomainError("ContaminatedLaw: null base law");
    require_unit(pi, "ContaminatedLaw: pi must lie in [0,1]");
    require_unit(c, "ContaminatedLaw: c must lie in [0,1]");
}

double ContaminatedLaw::cdf(double t) const {
    if (t < 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return (1.0 - pi_) * base_->cdf(t) + (t >= c_ ? pi_ : 0.0);
}

double ContaminatedLaw::quantile(double p) const {
    require_unit(p, "ContaminatedLaw::quantile: p must lie in [0,1]");
    if (pi_ == 1.0) return c_;
    if (pi_ == 0.0) return base_->quantile(p);
    // Mass strictly below c, then the atom, then the rest of the base law.
    const double below = (1.0 - pi_) * base_->cdf(std::nextafter(c_, -1.0));
    if (p <= below) return base_->quantile(std::min(1.0, p / (1.0 - pi_)));
    if (p <= below + pi_) return c_;
    return base_->quantile(std::min(1.0, (p - pi_) / (1.0 - pi_)));
}

double ContaminatedLaw::mean() const { return (1.0 - pi_) * base_->mean() + pi_ * c_; }

std::vector<double> ContaminatedLaw::kink_points() const {
    std::vector<double> out = base_->kink_points();
    out.push_back(c_);
    return out;
}

// ---------------------------------------------------------------------------
// EmpiricalLaw

EmpiricalLaw::EmpiricalLaw(std::vector<double> values, std::optional<RngStream> provenance)
    : values_(std::move(values)), provenance_(provenance) {
    if (values_.empty()) throw DomainError("EmpiricalLaw: sample must be nonempty");
    for (const double v : values_) require_unit(v, "EmpiricalLaw: values must lie in [0,1]");
    std::sort(values_.begin(), values_.end());

    const double n = static_cast<double>(values_.size());
    mean_ = std::accumulate(values_.begin(), values_.end(), 0.0) / n;
    if (values_.size() > 1) {
        double ss = 0.0;
        for (const double v : values_) ss += (v - mean_) * (v - mean_);
        sd_ = std::sqrt(ss / (n - 1.0));
        sem_ = sd_ / std::sqrt(n);
    }
}

double EmpiricalLaw::cdf(double t) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), t);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalLaw::quantile(double p) const {
    require_unit(p, "EmpiricalLaw::quantile: p must lie in [0,1]");
    const auto n = values_.size();
    auto index = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    index = std::clamp<std::size_t>(index, 1, n);
    return values_[index - 1];
}

std::vector<double> EmpiricalLaw::kink_points() const {
    std::vector<double> out(values_.begin(), values_.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// factories

std::shared_ptr<const BetaLaw> beta_reference(long n, long k) {
    if (n < 1 || k < 1) throw DomainError("beta_reference: n and k must be >= 1");
    return std::make_shared<const BetaLaw>(n, k);
}

std::shared_ptr<const PointMassLaw> point_mass(double location) {
    return std::make_shared<const PointMassLaw>(location);
}

std::shared_ptr<const ContaminatedLaw> contaminate(LawPtr base, double pi, double c) {
    return std::make_shared<const ContaminatedLaw>(std::move(base), pi, c);
}

std::shared_ptr<const PushforwardLaw> pushforward(LawPtr base, TransportMap map) {
    return std::make_shared<const PushforwardLaw>(std::move(base), std::move(map));
}

std::shared_ptr<const EmpiricalLaw> empirical_from_samples(std::vector<double> values,
                                                           std::optional<RngStream> provenance) {
    return std::make_shared<const EmpiricalLaw>(std::move(values), provenance);
}

std::vector<double> quadrature_breakpoints(const UnitLaw& law) {
    static constexpr double levels[] = {1e-9, 1e-6, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5,
                                        0.6,  0.7,  0.8,  0.9,  0.95, 0.99, 0.999, 1 - 1e-4, 1 - 1e-6, 1 - 1e-9};
    std::vector<double> out = law.kink_points();
    for (const double p : levels) out.push_back(law.quantile(p));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace betacov
