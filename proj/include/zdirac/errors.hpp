#pragma once

#include <stdexcept>
#include <string>

namespace zdirac {

// Input shape problems.
struct InvalidSize : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LengthMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// z_+ is not differentiable at the Dirac point (m = 0, xi = 0).
struct DiracPointError : std::domain_error {
    using std::domain_error::domain_error;
};

struct SingularResolvent : std::runtime_error {
    double abs_p;
    SingularResolvent(const std::string& what, double p) : std::runtime_error(what), abs_p(p) {}
};

struct ThresholdLevelError : std::domain_error {
    using std::domain_error::domain_error;
};

// Shift hits an eigenvalue closely enough to spoil the factorization.
struct ShiftCollision : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitWindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResolutionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfValidityRange : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(const std::string& field_path, const std::string& what)
        : std::runtime_error(field_path + ": " + what), field(field_path) {}
};

}  // namespace zdirac
