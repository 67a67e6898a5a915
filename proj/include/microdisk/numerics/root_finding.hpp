#pragma once

#include <complex>
#include <functional>

namespace microdisk::numerics
{

using cplx = std::complex<double>;
using ComplexFunction = std::function<cplx(cplx)>;

struct RootOptions
{
    int max_iterations = 200;
    /// Largest allowed Newton step in |z|. Non-positive disables clamping.
    double max_step = 0.0;
    /// Relative step for the central-difference derivative.
    double derivative_step = 1e-7;
};

struct RootResult
{
    cplx root;
    cplx residual;
    int iterations = 0;
    bool converged = false;
};

/// Damped Newton iteration with numerical derivative and backtracking.
/// f may throw PoleError; such trial points are treated as failed steps.
/// Throws ConvergenceError (carrying the last iterate) when |f| < tol is not reached.
RootResult find_complex_root(const ComplexFunction &f, cplx guess, double tol,
                             const RootOptions &options = {});

} // namespace microdisk::numerics
