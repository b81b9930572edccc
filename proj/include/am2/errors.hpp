#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace am2 {

/// Input outside the model's admissible domain (negative substrate, r not in (0,1), ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A solver precondition failed, e.g. a root bracket that the theory says must exist does not.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two routes that must agree (analytic vs numeric, closed form vs bisection) did not.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Adaptive step size collapsed below the floor.
class StiffnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration or command line; carries the offending line and field when known.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& msg, int line = 0, std::string field = {})
        : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line),
          field_(std::move(field)) {}
    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

} // namespace am2
