#pragma once

#include <stdexcept>
#include <string>

namespace tsketch {

/// Invalid scalar parameter (density out of range, nonpositive radius, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Operand dimensions do not match.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A guarded allocation would exceed its budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numerical precondition does not hold (zero residual, degenerate set).
struct PreconditionError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Experiment configuration rejected before any work was done.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

template <class E>
inline void require(bool ok, const std::string& what) {
    if (!ok) throw E(what);
}

}  // namespace detail
}  // namespace tsketch
