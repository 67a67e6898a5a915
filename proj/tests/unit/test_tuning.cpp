#include "microdisk/constants.hpp"
#include "microdisk/errors.hpp"
#include "microdisk/tuning.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace microdisk;

namespace
{

DiskGeometry disk(double d_um, double n = 1.454)
{
    DiskGeometry g;
    g.diameter = d_um * 1e-6;
    g.n_core = n;
    return g;
}

} // namespace

TEST_CASE("frequency shift is linear")
{
    CHECK(frequency_shift(0.0, 0.0) == 0.0);
    CHECK(frequency_shift(1e-3, 0.0) == -1e-3);
    CHECK(frequency_shift(0.0, 2e-3) == -2e-3);

    // 1e-5 index change at 780 nm
    const double nu = kSpeedOfLight / 780e-9;
    CHECK(std::abs(frequency_shift(1e-5, 0.0) * nu) == doctest::Approx(3.84e9).epsilon(0.01));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e-2, 1e-2);
    for (int i = 0; i < 1000; ++i)
    {
        const double a = u(rng), b = u(rng);
        CHECK(frequency_shift(a, b) == -frequency_shift(-a, -b));
        CHECK(frequency_shift(a, b) == frequency_shift(a, 0.0) + frequency_shift(0.0, b));
    }
}

TEST_CASE("full-FSR requirement is 1/l for the mode nearest the working wavelength")
{
    const DiskGeometry g = disk(15.0);
    const TuningRequirement r = fsr_scan_requirement(g, 780e-9);
    const WgmMode m = find_resonance_near(780e-9, g, 1);
    CHECK(r.l == m.l);
    CHECK(r.dD_over_D > 0.0);
    CHECK(r.dn_over_n > 0.0);
    CHECK(r.dD_over_D == doctest::Approx(1.0 / r.l).epsilon(1e-15));
    CHECK(r.dn_over_n == doctest::Approx(1.0 / r.l).epsilon(1e-15));
    // each requirement alone produces a shift of exactly one FSR fraction
    CHECK(std::abs(frequency_shift(0.0, r.dD_over_D)) * r.l == doctest::Approx(1.0));
    CHECK(std::abs(frequency_shift(r.dn_over_n, 0.0)) * r.l == doctest::Approx(1.0));

    const TuningRequirement half = fsr_scan_requirement(g, 780e-9, 0.5);
    CHECK(half.dn_over_n == doctest::Approx(0.5 * r.dn_over_n));
    CHECK_THROWS_AS(fsr_scan_requirement(g, 780e-9, 0.0), ValidationError);
    CHECK_THROWS_AS(fsr_scan_requirement(g, 300e-9), RangeError);
}

TEST_CASE("index tuning of 1% covers an FSR near D = 15 um")
{
    const TuningRequirement r = fsr_scan_requirement(disk(15.0), 780e-9);
    MESSAGE("l = " << r.l << ", dn/n = " << r.dn_over_n);
    CHECK(std::abs(r.dn_over_n / 0.01 - 1.0) < 0.25);
}

TEST_CASE("piezo tuning of 0.3% is within a factor 2 of the requirement at D = 30 um")
{
    const TuningRequirement r = fsr_scan_requirement(disk(30.0), 780e-9);
    MESSAGE("l = " << r.l << ", dD/D = " << r.dD_over_D);
    CHECK(0.003 >= 0.5 * r.dD_over_D);
    CHECK(0.003 <= 2.0 * r.dD_over_D);
}

TEST_CASE("requirement scales as 1/D")
{
    for (double n : {1.454, 2.17})
    {
        const auto a = fsr_scan_requirement(disk(15.0, n), 780e-9);
        const auto b = fsr_scan_requirement(disk(45.0, n), 780e-9);
        CHECK(std::abs(a.dD_over_D / b.dD_over_D / 3.0 - 1.0) < 0.05);
    }
}

TEST_CASE("tuning curve CSV")
{
    const auto rows = tuning_curve({10e-6, 20e-6}, {1.454, 2.17}, 780e-9);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].n_core == 1.454);
    CHECK(rows[2].n_core == 2.17);
    // higher index packs more wavelengths into the rim
    CHECK(rows[2].req.l > rows[0].req.l);
    CHECK(rows[1].req.l > rows[0].req.l);

    const auto path = std::filesystem::temp_directory_path() / "microdisk_tuning_test.csv";
    write_tuning_csv(rows, path.string(), "hash 0");
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    std::string line;
    std::getline(ss, line);
    CHECK(line == "# hash 0");
    std::getline(ss, line);
    CHECK(line == "D_um,n,l,dD_over_D,dn_over_n");
    int count = 0;
    while (std::getline(ss, line))
        ++count;
    CHECK(count == 4);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(write_tuning_csv(rows, "/nonexistent/dir/x.csv"), IoError);
}
