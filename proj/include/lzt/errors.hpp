#pragma once

#include <stdexcept>
#include <string>

namespace lzt {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation requested at a pole of the function.
struct PoleError : Error {
    using Error::Error;
};

// Argument outside the supported domain.
struct DomainError : Error {
    using Error::Error;
};

// A series or quadrature failed to meet its tail bound within budget.
struct ConvergenceError : Error {
    using Error::Error;
};

// A computed quantity is internally inconsistent (e.g. a value that must be
// real came back with a large imaginary part), indicating an upstream fault.
struct AccuracyError : Error {
    using Error::Error;
};

// Shape-restricted operation called with an unsupported period ratio.
struct UnsupportedShapeError : Error {
    using Error::Error;
};

// Bisection endpoints do not bracket the sought change.
struct BracketError : Error {
    using Error::Error;
};

// A classification window does not isolate a single zero cluster.
struct WindowError : Error {
    using Error::Error;
};

// A contour could not be perturbed off a zero of the integrand.
struct BoundaryZeroError : Error {
    using Error::Error;
};

// Iterative refinement exhausted its iteration budget.
struct NoConvergenceError : Error {
    using Error::Error;
};

} // namespace lzt
