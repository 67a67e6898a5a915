#pragma once

#include "microdisk/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <string>

namespace microdisk::numerics
{

/// Composite 20-point Gauss-Legendre over equal panels.
template <class F> double composite_gauss(const F &f, double a, double b, int panels)
{
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i)
        sum += boost::math::quadrature::gauss<double, 20>::integrate(f, a + i * h, a + (i + 1) * h);
    return sum;
}

/// Doubles the panel count until two estimates agree to `target` relative.
/// Throws AccuracyError if the last change still exceeds `accept`.
template <class F>
double converged_integral(const F &f, double a, double b, const std::string &what, int panels = 8,
                          double target = 1e-10, double accept = 1e-6)
{
    double prev = composite_gauss(f, a, b, panels);
    double change = 1.0;
    for (int round = 0; round < 7; ++round)
    {
        panels *= 2;
        const double next = composite_gauss(f, a, b, panels);
        const double scale = std::abs(next);
        change = scale > 0.0 ? std::abs(next - prev) / scale : std::abs(next - prev);
        prev = next;
        if (change <= target)
            break;
    }
    if (!(change <= accept))
        throw AccuracyError(what + " did not converge under panel doubling");
    return prev;
}

} // namespace microdisk::numerics
