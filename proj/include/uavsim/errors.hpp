#ifndef UAVSIM_ERRORS_HPP
#define UAVSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace uavsim {

// Base class for everything this library throws on purpose.
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

// Bad scenario/instance files, out-of-range parameters, unknown keys.
// CLI exit code 1.
class ValidationError : public SimError {
public:
    explicit ValidationError(const std::string& what) : SimError(what) {}
};

// Violated precondition of a numeric/geometric operation
// (position off segment, distance below reference, missing gain entry,
// infeasible sensing task, sensing outside the feasible region, ...).
// CLI exit code 2.
class DomainError : public SimError {
public:
    explicit DomainError(const std::string& what) : SimError(what) {}
};

// A QoS target that cannot be met at all (unreachable-qos,
// infeasible-start for the power control). CLI exit code 2.
class QosError : public SimError {
public:
    explicit QosError(const std::string& what) : SimError(what) {}
};

// An oracle or solver was asked for more work than its hard budget
// allows. CLI exit code 3.
class BudgetError : public SimError {
public:
    explicit BudgetError(const std::string& what) : SimError(what) {}
};

} // namespace uavsim

#endif
