#include "microdisk/numerics/root_finding.hpp"

#include "microdisk/errors.hpp"

#include <cmath>
#include <optional>

namespace microdisk::numerics
{

namespace
{

bool finite(cplx v)
{
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

std::optional<cplx> try_eval(const ComplexFunction &f, cplx z)
{
    try
    {
        const cplx v = f(z);
        if (!finite(v))
            return std::nullopt;
        return v;
    }
    catch (const PoleError &)
    {
        return std::nullopt;
    }
}

std::optional<cplx> derivative(const ComplexFunction &f, cplx z, cplx fz, double rel)
{
    const double h = rel * std::max(1.0, std::abs(z));
    const auto fp = try_eval(f, z + h);
    const auto fm = try_eval(f, z - h);
    if (fp && fm)
        return (*fp - *fm) / (2.0 * h);
    if (fp)
        return (*fp - fz) / h;
    if (fm)
        return (fz - *fm) / h;
    return std::nullopt;
}

} // namespace

RootResult find_complex_root(const ComplexFunction &f, cplx guess, double tol, const RootOptions &options)
{
    if (!(tol > 0.0))
        throw RangeError("root tolerance must be positive");

    cplx z = guess;
    auto fz0 = try_eval(f, z);
    if (!fz0)
        throw ConvergenceError("residual undefined at the initial guess", z, 0);
    cplx fz = *fz0;

    for (int it = 1; it <= options.max_iterations; ++it)
    {
        if (std::abs(fz) < tol)
        {
            // A few extra Newton steps settle the small components of z, which an
            // absolute residual test alone leaves loose.
            for (int p = 0; p < 3; ++p)
            {
                const auto d = derivative(f, z, fz, options.derivative_step);
                if (!d || *d == cplx(0.0, 0.0))
                    break;
                const cplx step = -fz / *d;
                const auto trial = try_eval(f, z + step);
                if (!trial || std::abs(*trial) >= tol)
                    break;
                const bool small_re = std::abs(step.real()) <= 1e-15 * std::abs(z.real());
                const bool small_im = std::abs(step.imag()) <= 1e-12 * std::abs(z.imag());
                z += step;
                fz = *trial;
                if (small_re && small_im)
                    break;
            }
            return {z, fz, it - 1, true};
        }

        const auto d = derivative(f, z, fz, options.derivative_step);
        if (!d || *d == cplx(0.0, 0.0))
            throw ConvergenceError("derivative vanished or undefined", z, it);

        cplx step = -fz / *d;
        if (options.max_step > 0.0 && std::abs(step) > options.max_step)
            step *= options.max_step / std::abs(step);

        double lambda = 1.0;
        bool accepted = false;
        cplx z_trial = z, f_trial = fz;
        for (int halving = 0; halving < 30; ++halving)
        {
            z_trial = z + lambda * step;
            const auto ft = try_eval(f, z_trial);
            if (ft && std::abs(*ft) < std::abs(fz))
            {
                f_trial = *ft;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted)
            throw ConvergenceError("line search failed to reduce the residual", z, it);
        z = z_trial;
        fz = f_trial;
    }
    throw ConvergenceError("no convergence within the iteration limit", z, options.max_iterations);
}

} // namespace microdisk::numerics
