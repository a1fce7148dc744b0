#pragma once

#include <stdexcept>
#include <string>

namespace sf {

// Rejected input: precondition violated by the caller.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Evaluation outside a worldline/kernel domain.
struct OutOfDomain : std::domain_error {
    using std::domain_error::domain_error;
};

// No retarded/advanced intersection exists in the domain.
struct NotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Field point on the worldline (or other genuine singularity).
struct Singularity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature or integration failed to reach the requested tolerance.
struct AccuracyError : std::runtime_error {
    AccuracyError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

// History horizon too short for the requested tail tolerance.
struct HorizonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sf
