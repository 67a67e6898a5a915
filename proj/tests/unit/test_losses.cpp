#include "microdisk/constants.hpp"
#include "microdisk/coupler.hpp"
#include "microdisk/errors.hpp"
#include "microdisk/losses.hpp"

#include <doctest.h>

#include <random>

using namespace microdisk;

TEST_CASE("material Q at 5 dB/km")
{
    const double alpha = attenuation_from_db_per_km(5.0);
    CHECK(alpha == doctest::Approx(1.151e-3).epsilon(1e-3));
    const double q = q_material(1.454, alpha, 780e-9);
    CHECK(q == doctest::Approx(1.0e10).epsilon(0.05));
    CHECK(q_material(1.454, 2 * alpha, 780e-9) == doctest::Approx(q / 2).epsilon(1e-15));
    CHECK(q_material(1.454, alpha, 1550e-9) == doctest::Approx(q * 780.0 / 1550.0).epsilon(1e-15));
}

TEST_CASE("surface Q hand evaluation and scaling")
{
    // 30e-6 * (780e-9)^2 / (2 * 10e-9 * pi^2 * (2e-9)^2) evaluated term by term
    const double num = 30e-6 * 780e-9 * 780e-9;
    const double den = 2.0 * 10e-9 * 9.8696044010893586188 * 4e-18;
    const double hand = num / den;
    const double q = q_surface(30e-6, 780e-9, {2e-9, 10e-9});
    CHECK(std::abs(q - hand) / hand < 1e-12);
    CHECK(q == doctest::Approx(2.31e7).epsilon(0.005));
    CHECK(q_surface(30e-6, 780e-9, {1e-9, 5e-9}) == doctest::Approx(8.0 * q).epsilon(1e-14));
    CHECK(q_surface(45e-6, 780e-9, {2e-9, 10e-9}) / q_surface(15e-6, 780e-9, {2e-9, 10e-9}) ==
          doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_AS(q_surface(30e-6, 780e-9, {0.0, 10e-9}), ValidationError);
}

TEST_CASE("reciprocal sum with a dominant channel")
{
    LossComponents c;
    c.q_wgm = 1e12;
    c.q_mat = 1e10;
    c.q_surf = 1e9;
    c.q_coup = 1e5;
    c.k_r = 8e6;
    c.l = 167;
    const LossBudget b = total_q(c);
    CHECK(b.q_total == doctest::Approx(1e5).epsilon(1e-3));
    const double inv = 1 / c.q_wgm + 1 / c.q_mat + 1 / c.q_surf + 1 / *c.q_coup;
    CHECK(std::abs(1.0 / b.q_total - inv) / inv < 1e-12);
    CHECK(b.kappa == doctest::Approx(kSpeedOfLight * c.k_r / (2 * b.q_total)));
    CHECK(b.finesse == doctest::Approx(b.q_total / c.l));
}

TEST_CASE("budget invariants on random inputs")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lq(3.0, 12.0);
    for (int i = 0; i < 200; ++i)
    {
        LossComponents c;
        c.q_wgm = std::pow(10.0, lq(rng));
        c.q_mat = std::pow(10.0, lq(rng));
        c.q_surf = std::pow(10.0, lq(rng));
        c.k_r = 8e6;
        c.l = 100;
        const LossBudget without = total_q(c);
        c.q_coup = std::pow(10.0, lq(rng));
        c.kappa_T = kSpeedOfLight * c.k_r / (2.0 * *c.q_coup);
        const LossBudget with = total_q(c);
        const double qmin = std::min({c.q_wgm, c.q_mat, c.q_surf, *c.q_coup});
        CHECK(with.q_total <= qmin);
        CHECK(with.q_total < without.q_total);
        CHECK(with.kappa_loss >= 0.0);
        // kappa_loss is the uncoupled kappa
        CHECK(with.kappa_loss == doctest::Approx(without.kappa).epsilon(1e-9));
    }
}

TEST_CASE("inconsistent coupling rate is rejected")
{
    LossComponents c;
    c.q_wgm = c.q_mat = c.q_surf = 1e8;
    c.q_coup = 1e6;
    c.k_r = 8e6;
    c.kappa_T = 1e12;
    CHECK_THROWS_AS(total_q(c), ConsistencyError);
}

TEST_CASE("budget JSON names every component")
{
    LossComponents c;
    c.q_wgm = c.q_mat = c.q_surf = 1e8;
    c.k_r = 8e6;
    c.l = 100;
    const std::string js = to_json(total_q(c));
    for (const char *key : {"Q_wgm", "Q_mat", "Q_surf", "Q_coup", "Q_total", "kappa_rad_s", "kappa_T_rad_s",
                            "kappa_loss_rad_s", "finesse"})
        CHECK(js.find(key) != std::string::npos);
}

TEST_CASE("uncoupled 30 um disk with the smoother surface reaches about 1e8")
{
    DiskGeometry g;
    const WgmMode m = solve_mode(167, 1, g, 780e-9);
    LossComponents c;
    c.q_wgm = m.q_wgm();
    c.q_mat = q_material(g.n_core, attenuation_from_db_per_km(5.0), m.wavelength());
    c.q_surf = q_surface(g.diameter, m.wavelength(), {1e-9, 5e-9});
    c.k_r = m.k_r();
    c.l = m.l;
    const LossBudget b = total_q(c);
    CHECK(b.q_total > 5e7);
    CHECK(b.q_total < 5e8);
}

TEST_CASE("Table-1 total Q at both gaps, 30 um l = 167")
{
    DiskGeometry g;
    const WgmMode m = solve_mode(167, 1, g, 780e-9);
    const CouplerModel model(m, g, 0.6e-6);
    auto total = [&](double gap) {
        const CouplerMatrix t = model.transmission(gap);
        LossComponents c;
        c.q_wgm = m.q_wgm();
        c.q_mat = q_material(g.n_core, attenuation_from_db_per_km(5.0), m.wavelength());
        c.q_surf = q_surface(g.diameter, m.wavelength(), {2e-9, 10e-9});
        c.q_coup = q_coup(t, m.l);
        c.kappa_T = kappa_T(t);
        c.k_r = m.k_r();
        c.l = m.l;
        return total_q(c).q_total;
    };
    const double q1 = total(0.3e-6);
    const double q2 = total(0.6e-6);
    MESSAGE("Q1 = " << q1 << ", Q2 = " << q2);
    CHECK(q1 / 1.55e5 > 1.0 / 3.0);
    CHECK(q1 / 1.55e5 < 3.0);
    CHECK(q2 / 8.44e6 > 1.0 / 3.0);
    CHECK(q2 / 8.44e6 < 3.0);
    CHECK(q2 > q1);
}
