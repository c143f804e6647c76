#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace neurobif {

// Bad argument value (non-finite input, k0 <= 0, non-positive period, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Caller broke an interface contract, e.g. a state of the wrong dimension.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical kernel could not deliver its post-condition. Carries the
// offending matrix when there is one.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what, Eigen::MatrixXd context = {})
        : std::runtime_error(what), context_(std::move(context)) {}

    const Eigen::MatrixXd& context() const noexcept { return context_; }

private:
    Eigen::MatrixXd context_;
};

// Iterative solver hit its cap; `last_iterate` is the best point it reached.
class NoConvergence : public NumericalFailure {
public:
    NoConvergence(const std::string& what, Eigen::VectorXd last_iterate)
        : NumericalFailure(what), last_(std::move(last_iterate)) {}

    const Eigen::VectorXd& last_iterate() const noexcept { return last_; }

private:
    Eigen::VectorXd last_;
};

// Integrator step size collapsed or the state left any reasonable range.
class IntegrationError : public NumericalFailure {
public:
    IntegrationError(const std::string& what, double time)
        : NumericalFailure(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key_path, const std::string& message)
        : std::runtime_error(key_path.empty() ? message : key_path + ": " + message),
          key_path_(key_path) {}

    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

}  // namespace neurobif
