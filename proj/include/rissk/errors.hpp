#pragma once

#include <stdexcept>
#include <string>

namespace rissk {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid configuration or parameter combination.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to converge or produced a non-finite value.
/// Carries the best estimate available at the time of failure.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double best_estimate = 0.0)
        : std::runtime_error(what), best_estimate_(best_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

}  // namespace rissk
