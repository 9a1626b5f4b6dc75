#pragma once

#include <stdexcept>
#include <string>

namespace wmrecall {

/// Argument outside the mathematical domain of an operation (non-finite input, tau <= 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller broke a structural contract (dimension mismatch, invalid configuration).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown by the integrator when the state leaves the finite / bounded region.
class IntegrationBlowup : public std::runtime_error {
public:
    IntegrationBlowup(double time, const std::string& what)
        : std::runtime_error(what + " at t=" + std::to_string(time)), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace wmrecall
