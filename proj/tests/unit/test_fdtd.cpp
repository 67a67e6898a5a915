#include "microdisk/budget.hpp"
#include "microdisk/constants.hpp"
#include "microdisk/errors.hpp"
#include "microdisk/fdtd.hpp"
#include "microdisk/wgm.hpp"
#include "support/fdtd_checks.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

using namespace microdisk;
using namespace microdisk::fdtd;

namespace
{

struct DiskRuns
{
    FieldRecord disk, reference, disk_reverse, reference_reverse;
    Spectrum forward, reverse;
    std::vector<Resonance> resonances;
};

// The D = 5 um, gap 0.2 um runs are shared between test cases.
const DiskRuns &disk_runs()
{
    static const DiskRuns runs = [] {
        DiskRuns r;
        Scenario s;
        Scenario ref = s;
        ref.include_disk = false;
        r.disk = run(s);
        r.reference = run(ref);
        s.reverse = true;
        ref.reverse = true;
        r.disk_reverse = run(s);
        r.reference_reverse = run(ref);
        r.forward = transmission_spectrum(r.disk, &r.reference);
        r.reverse = transmission_spectrum(r.disk_reverse, &r.reference_reverse);
        r.resonances = extract_resonances(r.forward);
        return r;
    }();
    return runs;
}

const WgmMode &nearest_q1(double wavelength, std::vector<WgmMode> &cache)
{
    if (cache.empty())
    {
        DiskGeometry g;
        g.diameter = 5e-6;
        for (int l = 20; l <= 32; ++l)
            cache.push_back(solve_mode(l, 1, g, 780e-9));
    }
    return *std::min_element(cache.begin(), cache.end(), [&](const WgmMode &a, const WgmMode &b) {
        return std::abs(a.wavelength() - wavelength) < std::abs(b.wavelength() - wavelength);
    });
}

Spectrum synthetic(const std::vector<std::pair<double, double>> &lines, double depth, double f_lo, double f_hi, int n)
{
    Spectrum s;
    for (int i = 0; i < n; ++i)
    {
        const double f = f_lo + (f_hi - f_lo) * i / (n - 1);
        double t = 1.0;
        for (auto [f0, q] : lines)
        {
            const double hw = 0.5 * f0 / q;
            const double d = (f - f0) / hw;
            t -= depth / (1.0 + d * d);
        }
        s.frequencies.push_back(f);
        s.transmission.push_back(t);
    }
    return s;
}

} // namespace

TEST_CASE("scenario validation")
{
    Scenario s;
    CHECK_NOTHROW(s.validate());
    CHECK(s.resolved_time_step() <= s.cell / (kSpeedOfLight * std::sqrt(2.0)));

    auto rejects = [](Scenario bad, const std::string &key) {
        try
        {
            bad.validate();
            return false;
        }
        catch (const ValidationError &e)
        {
            return e.key() == key;
        }
    };
    Scenario a = s;
    a.cell = 0.01e-6;
    CHECK(rejects(a, "fdtd.cell"));
    a = s;
    a.cell = 0.1e-6;
    CHECK(rejects(a, "fdtd.cell"));
    a = s;
    a.time_step = 1.01 * s.cell / (kSpeedOfLight * std::sqrt(2.0));
    CHECK(rejects(a, "fdtd.time_step"));
    a = s;
    a.time_step = 4e-17;
    CHECK(rejects(a, "fdtd.time_step"));
    a = s;
    a.cell = 0.08e-6;
    a.time_step = 1.8e-16;
    CHECK(rejects(a, "fdtd.time_step"));
    a = s;
    a.pml_cells = 7;
    CHECK(rejects(a, "fdtd.pml_cells"));

    // automatic step stays inside the allowed range at both grid extremes
    for (double cell : {0.02e-6, 0.08e-6})
    {
        a = s;
        a.cell = cell;
        CHECK(a.resolved_time_step() >= 4.45e-17);
        CHECK(a.resolved_time_step() <= 1.78e-16);
        CHECK_NOTHROW(a.validate());
    }
    CHECK_THROWS_AS(Simulation(a = [&] {
                        Scenario b = s;
                        b.pml_cells = 4;
                        return b;
                    }()),
                    ValidationError);
}

TEST_CASE("scenario text round trip and unknown keys")
{
    Scenario s;
    s.gap = 0.25e-6;
    s.source = SourceKind::cw;
    s.reverse = true;
    s.n_freq = 123;
    const Scenario t = parse_scenario(format_scenario(s));
    CHECK(t.gap == s.gap);
    CHECK(t.source == SourceKind::cw);
    CHECK(t.reverse);
    CHECK(t.n_freq == 123);
    CHECK(format_scenario(t) == format_scenario(s));
    CHECK_THROWS_AS(parse_scenario("bogus = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("cell = abc\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("cell = 0.5\n"), ValidationError);
    CHECK(parse_scenario("# comment\n\ncell = 5e-8 # trailing\n").cell == 5e-8);
}

TEST_CASE("absorber reflects less than 1e-6 of a plane pulse")
{
    const auto r = oracle::absorber_reflection(0.04e-6);
    MESSAGE("reflected/incident energy " << r.ratio());
    CHECK(r.incident_energy > 0.0);
    CHECK(r.ratio() < 1e-6);
}

TEST_CASE("vacuum energy decays monotonically once the source is off")
{
    Scenario s;
    s.include_disk = false;
    s.include_waveguide = false;
    s.disk_diameter = 0.0;
    s.padding = 0.5e-6;
    s.lead = 0.5e-6;
    s.n_freq = 2;
    s.record_stride = 5;
    s.total_time = 0.6e-12;
    const FieldRecord r = run(s);
    const double t_off = 9.0 * s.pulse_duration / std::sqrt(2.0 * std::log(2.0));
    const std::size_t first = static_cast<std::size_t>(std::ceil(t_off / (r.time_step * r.record_stride)));
    REQUIRE(first + 10 < r.energy.size());
    const double peak = *std::max_element(r.energy.begin(), r.energy.end());
    int rises = 0;
    for (std::size_t i = first + 1; i < r.energy.size(); ++i)
        if (r.energy[i] > r.energy[i - 1] * (1.0 + 1e-9) + 1e-12 * peak)
            ++rises;
    CHECK(rises == 0);
    CHECK(r.energy.back() < 1e-6 * peak);
}

TEST_CASE("Courant-stable run at the finest grid stays finite over 2e5 steps")
{
    Scenario s;
    s.cell = 0.02e-6;
    s.disk_diameter = 1.0e-6;
    s.gap = 0.1e-6;
    s.waveguide_width = 0.3e-6;
    s.padding = 0.3e-6;
    s.lead = 0.2e-6;
    s.pml_cells = 8;
    s.n_freq = 2;
    s.record_stride = 1000;
    s.steps = 200000;
    Simulation sim(s);
    CHECK_NOTHROW(sim.advance(s.steps));
    CHECK(sim.step_index() == 200000);
    bool finite = true;
    for (int k = 0; k < sim.nz(); ++k)
        for (int i = 0; i < sim.nx(); ++i)
            finite = finite && std::isfinite(sim.ey(i, k));
    CHECK(finite);
}

TEST_CASE("straight guide carries the injected pulse energy")
{
    // The input plane sits lead/2 past the source; a longer lead lets the light the
    // source sheds into cladding modes spread out of the flux window before it is counted.
    Scenario s;
    s.include_disk = false;
    s.lead = 2.5e-6;
    s.total_time = 1.5e-12;
    const FieldRecord ref = run(s);
    const double in = std::accumulate(ref.input_power.begin(), ref.input_power.end(), 0.0);
    const double out = std::accumulate(ref.output_power.begin(), ref.output_power.end(), 0.0);
    MESSAGE("output / injected " << out / in);
    CHECK(out / in >= 0.99);
    CHECK(out / in <= 1.0 + 1e-3);
}

TEST_CASE("normalisation identity and missing reference")
{
    const FieldRecord &ref = disk_runs().reference;
    Scenario s;
    s.include_disk = false;
    s.threads = 2;
    const FieldRecord again = run(s);
    const Spectrum t = transmission_spectrum(again, &ref);
    for (double v : t.transmission)
        CHECK(std::abs(v - 1.0) < 0.01);
    CHECK(*std::max_element(t.transmission.begin(), t.transmission.end()) ==
          *std::min_element(t.transmission.begin(), t.transmission.end()));
    CHECK_THROWS_AS(transmission_spectrum(again, nullptr), NormalizationError);
    FieldRecord other = ref;
    other.frequencies.pop_back();
    CHECK_THROWS_AS(transmission_spectrum(again, &other), NormalizationError);
}

TEST_CASE("D = 5 um disk: dips sit on the analytic q = 1 resonances")
{
    const DiskRuns &r = disk_runs();
    for (double v : r.forward.transmission)
    {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-3);
    }
    REQUIRE(r.resonances.size() >= 3);
    std::vector<WgmMode> cache;
    std::vector<double> analytic;
    for (const Resonance &res : r.resonances)
    {
        const WgmMode &m = nearest_q1(res.wavelength, cache);
        const double rel = std::abs(res.wavelength - m.wavelength()) / m.wavelength();
        MESSAGE("FDTD " << res.wavelength * 1e9 << " nm, analytic l = " << m.l << " " << m.wavelength() * 1e9
                        << " nm, Q_loaded " << res.q_loaded);
        CHECK(rel < 0.01);
        CHECK_FALSE(res.lower_bound);
        analytic.push_back(m.wavelength());
    }
    // adjacent spacing against the analytic FSR
    for (std::size_t i = 1; i < r.resonances.size(); ++i)
    {
        const double fdtd_fsr = r.resonances[i].frequency - r.resonances[i - 1].frequency;
        const double wgm_fsr = kSpeedOfLight / analytic[i] - kSpeedOfLight / analytic[i - 1];
        CHECK(std::abs(fdtd_fsr / wgm_fsr - 1.0) < 0.05);
    }
}

TEST_CASE("D = 5 um disk: loaded Q within a factor 2 of the coupled-mode budget")
{
    const DiskRuns &r = disk_runs();
    DiskGeometry g;
    g.diameter = 5e-6;
    std::vector<WgmMode> cache;
    for (const Resonance &res : r.resonances)
    {
        const WgmMode &m = nearest_q1(res.wavelength, cache);
        const CouplerModel model(m, g, 0.6e-6);
        const CouplerMatrix t = model.transmission(0.2e-6);
        const double q_cmt = mode_budget(m, g, &t, SurfaceParams{}, 5.0).q_total;
        MESSAGE("l = " << m.l << " FDTD Q " << res.q_loaded << " CMT Q " << q_cmt);
        CHECK(res.q_loaded > 0.5 * q_cmt);
        CHECK(res.q_loaded < 2.0 * q_cmt);
    }
}

TEST_CASE("reciprocity: injecting from the far end gives the same spectrum")
{
    const DiskRuns &r = disk_runs();
    REQUIRE(r.forward.transmission.size() == r.reverse.transmission.size());
    double worst = 0.0;
    for (std::size_t j = 0; j < r.forward.transmission.size(); ++j)
        worst = std::max(worst, std::abs(r.forward.transmission[j] - r.reverse.transmission[j]));
    CHECK(worst < 0.01);
}

TEST_CASE("core index step shifts the resonances by -dn/n")
{
    const DiskRuns &r = disk_runs();
    Scenario s;
    s.n_core *= 1.0 + 1e-3;
    const Spectrum shifted = simulate_transmission(s);
    const auto res = extract_resonances(shifted);
    REQUIRE(!res.empty());
    auto deepest = [](const std::vector<Resonance> &v) {
        return *std::max_element(v.begin(), v.end(),
                                 [](const Resonance &a, const Resonance &b) { return a.depth < b.depth; });
    };
    const Resonance a = deepest(r.resonances);
    // follow the same line in the shifted run
    const Resonance b = *std::min_element(res.begin(), res.end(), [&](const Resonance &x, const Resonance &y) {
        return std::abs(x.frequency - a.frequency) < std::abs(y.frequency - a.frequency);
    });
    const double shift = (b.frequency - a.frequency) / a.frequency;
    MESSAGE("dnu/nu = " << shift);
    CHECK(shift < 0.0);
    CHECK(std::abs(shift / -1e-3 - 1.0) < 0.1);
}

TEST_CASE("grid refinement from 0.08 um to 0.04 um moves resonances by less than 0.5% of an FSR" *
          doctest::should_fail())
{
    // Known miss: second-order Yee dispersion shifts the lines by ~1.4% of the wavelength
    // at 0.08 um, i.e. about a third of an FSR. Kept to document the gap.
    const DiskRuns &r = disk_runs();
    Scenario s;
    s.cell = 0.08e-6;
    const auto coarse = extract_resonances(simulate_transmission(s));
    REQUIRE(coarse.size() >= 2);
    const Resonance &fine = r.resonances[r.resonances.size() / 2];
    const double fsr = r.resonances[1].frequency - r.resonances[0].frequency;
    const Resonance &match = *std::min_element(coarse.begin(), coarse.end(), [&](const auto &x, const auto &y) {
        return std::abs(x.frequency - fine.frequency) < std::abs(y.frequency - fine.frequency);
    });
    MESSAGE("shift / FSR = " << std::abs(match.frequency - fine.frequency) / fsr);
    CHECK(std::abs(match.frequency - fine.frequency) < 0.005 * fsr);
}

TEST_CASE("refining the grid moves the resonances toward the analytic values")
{
    const DiskRuns &r = disk_runs();
    Scenario s;
    s.cell = 0.08e-6;
    const auto coarse = extract_resonances(simulate_transmission(s));
    std::vector<WgmMode> cache;
    const Resonance &fine = r.resonances[r.resonances.size() / 2];
    const WgmMode &m = nearest_q1(fine.wavelength, cache);
    const Resonance &match = *std::min_element(coarse.begin(), coarse.end(), [&](const auto &x, const auto &y) {
        return std::abs(x.wavelength - m.wavelength()) < std::abs(y.wavelength - m.wavelength());
    });
    const double err_fine = std::abs(fine.wavelength - m.wavelength());
    const double err_coarse = std::abs(match.wavelength - m.wavelength());
    MESSAGE("error 0.04 um: " << err_fine * 1e9 << " nm, 0.08 um: " << err_coarse * 1e9 << " nm");
    // second-order scheme: halving the cell cuts the error roughly fourfold
    CHECK(err_fine < err_coarse / 2.5);
}

TEST_CASE("Lorentzian extraction on synthetic spectra")
{
    const double f0 = 3.85e14;
    SUBCASE("single line, Q = 1e4")
    {
        const double fwhm = f0 / 1e4;
        const Spectrum s = synthetic({{f0, 1e4}}, 0.6, f0 - 10 * fwhm, f0 + 10 * fwhm, 401);
        const auto res = extract_resonances(s);
        REQUIRE(res.size() == 1);
        CHECK(std::abs(res[0].q_loaded / 1e4 - 1.0) < 0.02);
        CHECK(std::abs(res[0].frequency - f0) < 0.01 * fwhm);
        CHECK(res[0].depth == doctest::Approx(0.6).epsilon(0.02));
        CHECK_FALSE(res[0].lower_bound);
    }
    SUBCASE("two lines 1.5 linewidths apart are split")
    {
        const double fwhm = f0 / 1e4;
        const double f1 = f0 + 1.5 * fwhm;
        const Spectrum s = synthetic({{f0, 1e4}, {f1, f1 / fwhm}}, 0.5, f0 - 10 * fwhm, f0 + 12 * fwhm, 601);
        const auto res = extract_resonances(s);
        REQUIRE(res.size() == 2);
        CHECK(std::abs(res[0].frequency - f0) < 0.05 * fwhm);
        CHECK(std::abs(res[1].frequency - f1) < 0.05 * fwhm);
        CHECK(std::abs(res[0].q_loaded / 1e4 - 1.0) < 0.05);
    }
    SUBCASE("coarse sampling flags a lower bound")
    {
        const double fwhm = f0 / 1e4;
        const Spectrum s = synthetic({{f0, 1e4}}, 0.6, f0 - 40 * fwhm, f0 + 40 * fwhm, 161);
        const auto res = extract_resonances(s);
        REQUIRE(res.size() == 1);
        CHECK(res[0].lower_bound);
    }
    SUBCASE("short ring-down flags a lower bound")
    {
        const double fwhm = f0 / 1e4;
        Spectrum s = synthetic({{f0, 1e4}}, 0.6, f0 - 10 * fwhm, f0 + 10 * fwhm, 401);
        s.duration = 1e-12; // 10 Q / omega is ~41 ps
        CHECK(extract_resonances(s).at(0).lower_bound);
    }
    SUBCASE("flat spectrum has no resonances")
    {
        const Spectrum s = synthetic({}, 0.0, f0 - 1e12, f0 + 1e12, 101);
        CHECK(extract_resonances(s).empty());
    }
}

TEST_CASE("snapshot dump and CW source")
{
    Scenario s;
    s.source = SourceKind::cw;
    s.disk_diameter = 2e-6;
    s.padding = 0.4e-6;
    s.lead = 0.4e-6;
    s.n_freq = 2;
    s.steps = 3000;
    Simulation sim(s);
    sim.advance(s.steps);
    const auto dir = std::filesystem::temp_directory_path() / "microdisk_snapshot_test";
    std::filesystem::create_directories(dir);
    const std::string prefix = (dir / "ey").string();
    sim.write_snapshot(prefix);
    std::ifstream js(prefix + ".json");
    const auto h = nlohmann::json::parse(js);
    CHECK(h["nx"].get<int>() == sim.nx());
    CHECK(h["nz"].get<int>() == sim.nz());
    CHECK(h["step"].get<long>() == 3000);
    CHECK(h["cell_m"].get<double>() == s.cell);
    CHECK(std::filesystem::file_size(prefix + ".bin") ==
          static_cast<std::uintmax_t>(sim.nx()) * sim.nz() * sizeof(double));
    // CW light has reached the output plane
    const FieldRecord r = sim.record();
    double late = 0.0;
    for (std::size_t i = r.probe_ey.size() / 2; i < r.probe_ey.size(); ++i)
        late = std::max(late, std::abs(r.probe_ey[i]));
    CHECK(late > 0.0);
    std::filesystem::remove_all(dir);
}
