#include "microdisk/constants.hpp"
#include "microdisk/coupler.hpp"
#include "microdisk/errors.hpp"

#include <doctest.h>

#include <random>

using namespace microdisk;

namespace
{

DiskGeometry disk(double d_um)
{
    DiskGeometry g;
    g.diameter = d_um * 1e-6;
    return g;
}

// Plain bisection on the even-TE slab relation, written independently of the solver:
// sqrt(n_c^2 - n^2) tan(k w/2 sqrt(n_c^2 - n^2)) = sqrt(n^2 - n_cl^2) for n in (n_cl, n_c).
double slab_index_oracle(double w, double nc, double ncl, double lambda)
{
    const double k = 2.0 * kPi / lambda;
    auto g = [&](double n) {
        const double kt = std::sqrt(nc * nc - n * n);
        return kt * std::tan(0.5 * k * w * kt) - std::sqrt(n * n - ncl * ncl);
    };
    // the fundamental lies above the index where k w/2 kt = pi/2
    const double n_low = std::sqrt(std::max(ncl * ncl, nc * nc - std::pow(kPi / (k * w), 2))) + 1e-15;
    double lo = n_low, hi = nc - 1e-15;
    for (int i = 0; i < 200; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct Fixture
{
    DiskGeometry g = disk(30);
    WgmMode mode = solve_mode(167, 1, g, 780e-9);
    CouplerModel model{mode, g, 0.6e-6};
};

} // namespace

TEST_CASE("slab waveguide at 0.6 um is single mode and matches the bisection oracle")
{
    const SlabMode s = solve_slab_mode(0.6e-6, 1.454, 1.0, 780e-9);
    CHECK(s.n_eff > 1.0);
    CHECK(s.n_eff < 1.454);
    const double ref = slab_index_oracle(0.6e-6, 1.454, 1.0, 780e-9);
    CHECK(std::abs(s.n_eff - ref) / ref < 1e-10);
    CHECK(s.profile(0.0) == 1.0);
    CHECK(s.profile(0.2e-6) == doctest::Approx(s.profile(-0.2e-6)));
    CHECK(s.profile(0.5e-6) < s.profile(0.31e-6));
    // continuity of value at the wall
    CHECK(std::abs(s.profile(0.3e-6 - 1e-18) - s.profile(0.3e-6 + 1e-18)) < 1e-9);
}

TEST_CASE("slab solver rejects multimode and guideless inputs")
{
    CHECK_THROWS_AS(solve_slab_mode(2.0e-6, 1.454, 1.0, 780e-9), MultimodeError);
    CHECK_THROWS_AS(solve_slab_mode(0.6e-6, 1.0, 1.0, 780e-9), NoModeError);
    CouplerGeometry cg;
    cg.width = 0.1e-6;
    CHECK_THROWS_AS(cg.validate(), ValidationError);
    cg.width = 0.6e-6;
    cg.gap = -1e-9;
    CHECK_THROWS_AS(cg.validate(), ValidationError);
}

TEST_CASE("slab power norm matches direct quadrature")
{
    const SlabMode s = solve_slab_mode(0.4e-6, 1.454, 1.0, 780e-9);
    double sum = 0.0;
    const double h = 1e-10;
    for (double x = -6e-6; x < 6e-6; x += h)
        sum += std::pow(s.profile(x + 0.5 * h), 2) * h;
    CHECK(s.power_norm() == doctest::Approx(sum).epsilon(1e-6));
}

TEST_CASE("coupling coefficient is maximal at closest approach and decays with gap")
{
    Fixture f;
    const double c01 = f.model.coupling_coefficient(0.0, 0.1e-6);
    const double c05 = f.model.coupling_coefficient(0.0, 0.5e-6);
    CHECK(c01 > c05);
    CHECK(c05 > 0.0);
    for (double z = 0.2e-6; z < 5e-6; z += 0.4e-6)
        CHECK(f.model.coupling_coefficient(z, 0.3e-6) < f.model.coupling_coefficient(0.0, 0.3e-6));
    const double zmax = f.model.coupling_window(0.3e-6);
    CHECK(std::abs(f.model.coupling_coefficient(zmax, 0.3e-6)) < 1e-4 * f.model.coupling_coefficient(0.0, 0.3e-6));
}

TEST_CASE("free-function coupling coefficient agrees with the model")
{
    Fixture f;
    CouplerGeometry cg;
    cg.disk = f.g;
    cg.gap = 0.3e-6;
    CHECK(coupling_coefficient(1e-6, f.model.slab(), f.mode, cg) ==
          doctest::Approx(f.model.coupling_coefficient(1e-6, 0.3e-6)).epsilon(1e-14));
}

TEST_CASE("C(0) halving distance follows the slab evanescent decay")
{
    // fit exp(-a gap) over 0.3..0.7 um and compare with the slab decay constant
    Fixture f;
    const double c1 = f.model.coupling_coefficient(0.0, 0.3e-6);
    const double c2 = f.model.coupling_coefficient(0.0, 0.7e-6);
    const double a = std::log(c1 / c2) / 0.4e-6;
    const double halving = std::log(2.0) / a;
    const double expect = std::log(2.0) / f.model.slab().gamma;
    CHECK(halving == doctest::Approx(expect).epsilon(0.15));
}

TEST_CASE("transmission matrix: decoupled limit, power, reciprocity, gauge")
{
    Fixture f;
    const CouplerMatrix far = f.model.transmission(3e-6);
    CHECK(far.t12_abs2() < 1e-8);

    const CouplerMatrix t = f.model.transmission(0.3e-6);
    CHECK(t.power_drift < 1e-8);
    CHECK(std::abs(t.t12_abs_raw - t.t21_abs_raw) < 1e-9);
    CHECK(std::abs(t.t12 - t.t21) < 1e-6);
    CHECK(std::abs(t.t11) <= 1.0);
    CHECK(std::abs(t.t12) <= 1.0);
    CHECK(std::norm(t.t11) + std::norm(t.t21) <= 1.0 + 1e-6);
    CHECK(t.t11.imag() == 0.0);
    CHECK(t.t11.real() >= 0.0);
    CHECK(t.t12.real() == 0.0);
    CHECK(t.edge_ratio < 1e-4);
}

TEST_CASE("|t12| decreases strictly with gap")
{
    Fixture f;
    double prev = 2.0;
    for (double gap = 0.05e-6; gap <= 1.5e-6 + 1e-12; gap += 0.05e-6)
    {
        CAPTURE(gap);
        const double t = std::abs(f.model.transmission(gap).t12);
        CHECK(t < prev);
        prev = t;
    }
}

TEST_CASE("phase matching maximizes the cross coupling")
{
    Fixture f;
    CouplerOptions matched;
    matched.phase_matched = true;
    for (double gap : {0.3e-6, 0.6e-6})
        CHECK(std::abs(f.model.transmission(gap, matched).t12) > std::abs(f.model.transmission(gap).t12));
}

TEST_CASE("kappa_T and Q_coup identities")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> t2(1e-6, 0.5);
    std::uniform_int_distribution<int> ls(20, 300);
    std::uniform_real_distribution<double> kr(7e6, 9e6);
    for (int i = 0; i < 20; ++i)
    {
        CouplerMatrix t;
        const double a = std::sqrt(t2(rng));
        t.t12 = t.t21 = cplx(0.0, a);
        t.t11 = t.t22 = std::sqrt(1.0 - a * a);
        t.l = ls(rng);
        t.k_r = kr(rng);
        t.round_trip_time = 2.0 * kPi * t.l / (kSpeedOfLight * t.k_r);
        const double lhs = kSpeedOfLight * t.k_r / (2.0 * kappa_T(t));
        const double rhs = *q_coup(t, t.l);
        CHECK(std::abs(lhs - rhs) / rhs < 1e-9);
    }
    CouplerMatrix zero;
    zero.round_trip_time = 1e-12;
    CHECK(kappa_T(zero) == 0.0);
    CHECK_FALSE(q_coup(zero, 100).has_value());
}
