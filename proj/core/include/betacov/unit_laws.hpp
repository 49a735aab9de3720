#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "betacov/quadrature.hpp"
#include "betacov/rng.hpp"
#include "betacov/transport_map.hpp"

namespace betacov {

/// A probability law on [0,1].
///
/// Implementations are immutable after construction and safe to share
/// across threads. `quantile` is the left-continuous generalized inverse
/// inf{t : cdf(t) >= p}.
class UnitLaw {
public:
    virtual ~UnitLaw() = default;

    virtual double cdf(double t) const = 0;
    virtual double quantile(double p) const = 0;
    virtual double mean() const = 0;
    virtual std::optional<double> density(double /*t*/) const { return std::nullopt; }
    /// Locations in [0,1] where the cdf jumps or has a kink.
    virtual std::vector<double> kink_points() const { return {}; }
};

using LawPtr = std::shared_ptr<const UnitLaw>;

/// Beta(k, n+1-k), the law of the k-th of n uniform order statistics.
/// For k > n it is the point mass at 1 (threshold at +infinity).
class BetaLaw final : public UnitLaw {
public:
    BetaLaw(long n, long k);

    long n() const noexcept { return n_; }
    long k() const noexcept { return k_; }
    bool degenerate() const noexcept { return k_ > n_; }
    double shape_a() const noexcept { return static_cast<double>(k_); }
    double shape_b() const noexcept { return static_cast<double>(n_ + 1 - k_); }

    double cdf(double t) const override;
    double quantile(double p) const override;
    double mean() const override;
    std::optional<double> density(double t) const override;
    std::vector<double> kink_points() const override;

private:
    long n_;
    long k_;
};

class PointMassLaw final : public UnitLaw {
public:
    explicit PointMassLaw(double location);

    double location() const noexcept { return location_; }

    double cdf(double t) const override { return t >= location_ ? 1.0 : 0.0; }
    double quantile(double /*p*/) const override { return location_; }
    double mean() const override { return location_; }
    std::vector<double> kink_points() const override { return {location_}; }

private:
    double location_;
};

/// Law of map(X) for X ~ base and a strictly increasing map.
class PushforwardLaw final : public UnitLaw {
public:
    PushforwardLaw(LawPtr base, TransportMap map);

    const UnitLaw& base() const noexcept { return *base_; }
    const TransportMap& map() const noexcept { return map_; }

    double cdf(double t) const override;
    double quantile(double p) const override;
    double mean() const override { return mean_; }
    std::optional<double> density(double z) const override;
    std::vector<double> kink_points() const override;

private:
    LawPtr base_;
    TransportMap map_;
    double mean_ = 0.0;
};

/// (1 - pi) * base + pi * delta_c.
class ContaminatedLaw final : public UnitLaw {
public:
    ContaminatedLaw(LawPtr base, double pi, double c);

    const UnitLaw& base() const noexcept { return *base_; }
    double weight() const noexcept { return pi_; }
    double location() const noexcept { return c_; }

    double cdf(double t) const override;
    double quantile(double p) const override;
    double mean() const override;
    std::vector<double> kink_points() const override;

private:
    LawPtr base_;
    double pi_;
    double c_;
};

/// Sorted sample with a right-continuous step cdf.
class EmpiricalLaw final : public UnitLaw {
public:
    EmpiricalLaw(std::vector<double> values, std::optional<RngStream> provenance);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t count() const noexcept { return values_.size(); }
    const std::optional<RngStream>& provenance() const noexcept { return provenance_; }
    /// Sample standard deviation / sqrt(count); zero for a single value.
    double standard_error_of_mean() const noexcept { return sem_; }
    double sample_sd() const noexcept { return sd_; }

    double cdf(double t) const override;
    /// values[ceil(p * count) - 1], clamped to the first value at p = 0.
    double quantile(double p) const override;
    double mean() const override { return mean_; }
    std::vector<double> kink_points() const override;

private:
    std::vector<double> values_;
    std::optional<RngStream> provenance_;
    double mean_ = 0.0;
    double sd_ = 0.0;
    double sem_ = 0.0;
};

/// beta_{n,k} = Beta(k, n+1-k); point mass at one when k > n.
std::shared_ptr<const BetaLaw> beta_reference(long n, long k);

std::shared_ptr<const PointMassLaw> point_mass(double location);

std::shared_ptr<const ContaminatedLaw> contaminate(LawPtr base, double pi, double c);

std::shared_ptr<const PushforwardLaw> pushforward(LawPtr base, TransportMap map);

/// Throws DomainError for empty input or values outside [0,1].
std::shared_ptr<const EmpiricalLaw> empirical_from_samples(std::vector<double> values,
                                                           std::optional<RngStream> provenance = std::nullopt);

/// Split points for integrating functionals of `law` over [0,1]: its kinks
/// plus quantiles spread over the bulk and both tails, so that adaptive
/// refinement never starts from panels that all miss a concentrated law.
std::vector<double> quadrature_breakpoints(const UnitLaw& law);

} // namespace betacov
