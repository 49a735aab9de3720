#pragma once

#include <stdexcept>
#include <string>

namespace betacov {

/// Argument outside the documented domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class QuadratureFailure : public std::runtime_error {
public:
    QuadratureFailure(const std::string& what, double best_estimate, double achieved_tolerance)
        : std::runtime_error(what),
          best_estimate_(best_estimate),
          achieved_tolerance_(achieved_tolerance) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double achieved_tolerance() const noexcept { return achieved_tolerance_; }

private:
    double best_estimate_;
    double achieved_tolerance_;
};

/// Two independently computed quantities that must agree did not.
/// Signals a numerical defect, never a property of the inputs.
class IdentityViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Threshold index k exceeds the calibration size n: the conformal threshold
/// is +infinity and realized coverage is identically one.
class DegenerateCoverage : public std::domain_error {
public:
    DegenerateCoverage(const std::string& what, long n, long k)
        : std::domain_error(what), n_(n), k_(k) {}

    long n() const noexcept { return n_; }
    long k() const noexcept { return k_; }

private:
    long n_;
    long k_;
};

} // namespace betacov
