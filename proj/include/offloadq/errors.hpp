#ifndef OFFLOADQ_ERRORS_HPP
#define OFFLOADQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace offloadq {

// Invalid argument outside a function's mathematical domain.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Offered load at or above the service capacity of the system.
struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative solver exceeded its configured limits without meeting tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid run configuration (simulation or CLI).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A linear system that should be regular turned out degenerate.
struct SingularSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace offloadq

#endif
