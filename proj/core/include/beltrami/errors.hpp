#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace beltrami {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid grid/operator parameters or mismatched grids in an operation.
struct SpecError : Error {
    using Error::Error;
};

// Bad CLI/config input.
struct ConfigError : Error {
    using Error::Error;
};

// Fixed-point iteration ran out of iterations.
struct NonConvergence : Error {
    NonConvergence(const std::string& what, double last_ratio_, int iterations_)
        : Error(what), last_ratio(last_ratio_), iterations(iterations_) {}
    double last_ratio = 0.0;
    int iterations = 0;
};

// A structure function exceeded its declared Lipschitz budget during a solve.
struct EllipticityViolation : Error {
    using Error::Error;
};

// Newton hit a (near-)singular Jacobian; carries the offending parameter.
struct NewtonStall : Error {
    NewtonStall(const std::string& what, std::complex<double> where_)
        : Error(what), where(where_) {}
    std::complex<double> where;
};

// Requested inversion target lies outside the sampled chart region.
struct OutsideChart : Error {
    using Error::Error;
};

}  // namespace beltrami
