#pragma once

#include <stdexcept>
#include <string>

namespace qtraj {

// Base class for every error raised by the library, so callers can catch
// one type at the CLI boundary and map it to an exit code.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A series or iteration failed to reach its stopping criterion.
struct ConvergenceFailure : Error {
    using Error::Error;
};

// Hypergeometric parameters hit a pole/degeneracy that even the
// regularizing perturbation could not lift.
struct DegenerateParameters : Error {
    using Error::Error;
};

// Model construction rejected unphysical inputs (V0 <= 0, a <= 0, ...).
struct InvalidModel : Error {
    using Error::Error;
};

// Velocity requested too close to a wavefunction node.
struct NodeProximity : Error {
    using Error::Error;
};

// Node search found nothing inside the requested window.
struct NoPoleInWindow : Error {
    using Error::Error;
};

// Newton refinement walked away from its seed instead of contracting.
struct NewtonDivergence : Error {
    using Error::Error;
};

// Adaptive quadrature could not meet the requested tolerance.
struct QuadratureFailure : Error {
    using Error::Error;
};

// A node ordinate fell outside the principal strip (-pi*a, pi*a].
struct BetaOutOfPeriod : Error {
    using Error::Error;
};

// Bisection for the tunneling/reflection boundary found no sign change.
struct NoTunnelingFound : Error {
    using Error::Error;
};

}  // namespace qtraj
