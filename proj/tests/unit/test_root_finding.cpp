#include "microdisk/errors.hpp"
#include "microdisk/numerics/root_finding.hpp"

#include <doctest.h>

using namespace microdisk;
using namespace microdisk::numerics;

TEST_CASE("quadratic root from an imaginary guess")
{
    const auto r = find_complex_root([](cplx z) { return z * z + 1.0; }, cplx(0.0, 0.9), 1e-14);
    CHECK(r.converged);
    CHECK(std::abs(r.root - cplx(0.0, 1.0)) < 1e-12);
}

TEST_CASE("linear root")
{
    const auto r = find_complex_root([](cplx z) { return z - 2.0; }, 0.0, 1e-14);
    CHECK(std::abs(r.root - 2.0) < 1e-12);
    CHECK(r.iterations <= 2);
}

TEST_CASE("identical inputs give bit-identical roots")
{
    auto f = [](cplx z) { return std::sin(z) - 0.3 * z + cplx(0.0, 0.01); };
    const auto a = find_complex_root(f, cplx(2.0, 0.1), 1e-13);
    const auto b = find_complex_root(f, cplx(2.0, 0.1), 1e-13);
    CHECK(a.root.real() == b.root.real());
    CHECK(a.root.imag() == b.root.imag());
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("poles on the path are stepped around")
{
    // the full first Newton step from 0.5 lands at 4.25, inside the excluded disc
    auto f = [](cplx z) {
        if (std::abs(z - 4.25) < 0.1)
            throw PoleError("pole");
        return z * z - 4.0;
    };
    const auto r = find_complex_root(f, cplx(0.5, 0.0), 1e-12);
    CHECK(std::abs(r.root - 2.0) < 1e-10);
}

TEST_CASE("no root raises convergence error with the last iterate")
{
    auto f = [](cplx z) { return std::exp(z); };
    try
    {
        find_complex_root(f, 0.0, 1e-12, RootOptions{.max_iterations = 20});
        FAIL("expected ConvergenceError");
    }
    catch (const ConvergenceError &e)
    {
        CHECK(std::isfinite(e.last_iterate().real()));
        CHECK(e.iterations() > 0);
    }
}

TEST_CASE("non-positive tolerance is rejected")
{
    CHECK_THROWS_AS(find_complex_root([](cplx z) { return z; }, 1.0, 0.0), RangeError);
}
