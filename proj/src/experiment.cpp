#include "microdisk/experiment.hpp"

#include "microdisk/budget.hpp"
#include "microdisk/constants.hpp"
#include "microdisk/coupler.hpp"
#include "microdisk/errors.hpp"
#include "microdisk/parallel.hpp"
#include "microdisk/tuning.hpp"
#include "text_fields.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace microdisk::experiment
{

namespace
{

using detail::to_double;
using detail::to_long;
using detail::trim;

std::string num17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_list(const std::string &v)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

std::vector<double> to_double_list(const std::string &key, const std::string &v)
{
    std::vector<double> out;
    for (const auto &s : split_list(v))
        out.push_back(to_double(key, s));
    return out;
}

std::vector<int> to_int_list(const std::string &key, const std::string &v)
{
    std::vector<int> out;
    for (const auto &s : split_list(v))
        out.push_back(static_cast<int>(to_long(key, s)));
    return out;
}

template <class T> std::string join(const std::vector<T> &v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        if (i)
            out += ", ";
        if constexpr (std::is_same_v<T, double>)
            out += num17(v[i]);
        else
            out += std::to_string(v[i]);
    }
    return out;
}

const char *delta_c_name(DeltaCMode m)
{
    switch (m)
    {
    case DeltaCMode::zero:
        return "zero";
    case DeltaCMode::plus_eps:
        return "plus_eps";
    case DeltaCMode::minus_eps:
        return "minus_eps";
    }
    return "zero";
}

struct Field
{
    std::string key;
    std::function<void(Config &, const std::string &)> set;
    std::function<std::string(const Config &)> get;
};

ScanRange &scan_of(Config &c)
{
    if (!c.scan)
        c.scan.emplace();
    return *c.scan;
}

const std::vector<Field> &fields()
{
    static const std::vector<Field> table = [] {
        std::vector<Field> t;
        auto dbl = [&t](const std::string &key, auto member) {
            t.push_back({key, [key, member](Config &c, const std::string &v) { member(c) = to_double(key, v); },
                         [member](const Config &c) { return num17(member(const_cast<Config &>(c))); }});
        };
        auto integer = [&t](const std::string &key, auto member) {
            t.push_back({key,
                         [key, member](Config &c, const std::string &v) {
                             member(c) = static_cast<int>(to_long(key, v));
                         },
                         [member](const Config &c) { return std::to_string(member(const_cast<Config &>(c))); }});
        };

        t.push_back({"experiment",
                     [](Config &c, const std::string &v) {
                         for (const auto &e : catalog())
                             if (e.name == v)
                             {
                                 c.kind = e.kind;
                                 return;
                             }
                         throw ValidationError("experiment", "unknown experiment '" + v + "'");
                     },
                     [](const Config &c) { return kind_name(c.kind); }});
        integer("threads", [](Config &c) -> int & { return c.threads; });

        dbl("geometry.diameter", [](Config &c) -> double & { return c.disk.diameter; });
        dbl("geometry.height", [](Config &c) -> double & { return c.disk.height; });
        dbl("geometry.n_core", [](Config &c) -> double & { return c.disk.n_core; });
        dbl("geometry.n_clad", [](Config &c) -> double & { return c.disk.n_clad; });
        dbl("surface.sigma", [](Config &c) -> double & { return c.surface.sigma; });
        dbl("surface.correlation_length", [](Config &c) -> double & { return c.surface.correlation_length; });
        dbl("losses.db_per_km", [](Config &c) -> double & { return c.loss_db_per_km; });

        integer("mode.l", [](Config &c) -> int & { return c.l; });
        integer("mode.q", [](Config &c) -> int & { return c.q; });
        dbl("mode.wavelength", [](Config &c) -> double & { return c.wavelength; });

        dbl("coupler.width", [](Config &c) -> double & { return c.width; });
        dbl("coupler.gap", [](Config &c) -> double & { return c.gap; });
        dbl("coupler.gap2", [](Config &c) -> double & { return c.gap2; });

        dbl("atom.gamma", [](Config &c) -> double & { return c.atom_gamma; });
        dbl("atom.detuning_over_gamma", [](Config &c) -> double & { return c.detuning_over_gamma; });
        dbl("atom.distance", [](Config &c) -> double & { return c.atom_distance; });
        dbl("atom.azimuth", [](Config &c) -> double & { return c.atom_azimuth; });

        dbl("detection.tau", [](Config &c) -> double & { return c.tau; });
        dbl("detection.pump", [](Config &c) -> double & { return c.pump; });
        dbl("detection.epsilon", [](Config &c) -> double & { return c.epsilon_over_kappa_loss; });
        t.push_back({"detection.delta_c",
                     [](Config &c, const std::string &v) {
                         if (v == "zero")
                             c.delta_c = DeltaCMode::zero;
                         else if (v == "plus_eps")
                             c.delta_c = DeltaCMode::plus_eps;
                         else if (v == "minus_eps")
                             c.delta_c = DeltaCMode::minus_eps;
                         else
                             throw ValidationError("detection.delta_c",
                                                   "expected zero, plus_eps or minus_eps, got '" + v + "'");
                     },
                     [](const Config &c) { return std::string(delta_c_name(c.delta_c)); }});

        // scan.* are emitted from effective_scan() by canonical(); getters are unused
        auto none = [](const Config &) { return std::string(); };
        t.push_back({"scan.values",
                     [](Config &c, const std::string &v) { scan_of(c).values = to_double_list("scan.values", v); },
                     none});
        t.push_back({"scan.start",
                     [](Config &c, const std::string &v) { scan_of(c).start = to_double("scan.start", v); }, none});
        t.push_back(
            {"scan.stop", [](Config &c, const std::string &v) { scan_of(c).stop = to_double("scan.stop", v); }, none});
        t.push_back({"scan.points",
                     [](Config &c, const std::string &v) {
                         scan_of(c).points = static_cast<int>(to_long("scan.points", v));
                     },
                     none});
        t.push_back({"scan.spacing",
                     [](Config &c, const std::string &v) {
                         if (v != "linear" && v != "log")
                             throw ValidationError("scan.spacing", "expected linear or log, got '" + v + "'");
                         scan_of(c).log_spacing = v == "log";
                     },
                     none});

        t.push_back({"modes.diameters",
                     [](Config &c, const std::string &v) { c.mode_diameters = to_double_list("modes.diameters", v); },
                     [](const Config &c) { return join(c.mode_diameters); }});
        t.push_back({"modes.l", [](Config &c, const std::string &v) { c.mode_l = to_int_list("modes.l", v); },
                     [](const Config &c) { return join(c.mode_l); }});
        t.push_back({"modes.q", [](Config &c, const std::string &v) { c.mode_q = to_int_list("modes.q", v); },
                     [](const Config &c) { return join(c.mode_q); }});

        t.push_back({"tuning.indices",
                     [](Config &c, const std::string &v) { c.tuning_indices = to_double_list("tuning.indices", v); },
                     [](const Config &c) { return join(c.tuning_indices); }});
        dbl("tuning.fsr_fraction", [](Config &c) -> double & { return c.fsr_fraction; });
        return t;
    }();
    return table;
}

bool has_scan(Kind k)
{
    return k != Kind::modes && k != Kind::fdtd_spectrum;
}

bool same(double a, double b)
{
    return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

Target within(std::string name, double value, double lower, double upper, double reference)
{
    return {std::move(name), value, lower, upper, reference, value >= lower && value <= upper};
}

Target factor(std::string name, double value, double reference, double f)
{
    return within(std::move(name), value, reference / f, reference * f, reference);
}

std::string fmt_label(const char *pattern, double a, long b = 0, long c = 0)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

WgmMode pick_mode(const Config &c, const DiskGeometry &g, bool allow_fixed_l = true)
{
    if (allow_fixed_l && c.l > 0)
        return solve_mode(c.l, c.q, g, c.wavelength);
    return find_resonance_near(c.wavelength, g, c.q);
}

DiskGeometry with_diameter(const DiskGeometry &base, double d)
{
    DiskGeometry g = base;
    g.diameter = d;
    return g;
}

AtomParams atom_of(const Config &c)
{
    return AtomParams{c.atom_gamma, c.detuning_over_gamma * c.atom_gamma, 0.0, c.atom_azimuth};
}

bool default_disk_material(const Config &c)
{
    const DiskGeometry d;
    return same(c.disk.n_core, d.n_core) && same(c.disk.n_clad, d.n_clad) && same(c.disk.height, d.height);
}

bool default_coupler_and_losses(const Config &c)
{
    const Config d;
    return default_disk_material(c) && same(c.width, d.width) && same(c.gap, d.gap) && same(c.gap2, d.gap2) &&
           same(c.surface.sigma, d.surface.sigma) &&
           same(c.surface.correlation_length, d.surface.correlation_length) &&
           same(c.loss_db_per_km, d.loss_db_per_km);
}

// Reference mode table: D (um), l, q, lambda (nm), Q at gap 0.3 um, Q at gap 0.6 um, g0 (MHz).
struct ReferenceMode
{
    double d_um;
    int l, q;
    double lambda_nm, q1, q2, g0_mhz;
};

constexpr ReferenceMode kReferenceModes[] = {
    {30, 167, 1, 778.73, 1.55e5, 8.44e6, 102.6}, {30, 166, 1, 783.27, 1.47e5, 8.05e6, 103.2},
    {30, 159, 2, 780.04, 1.83e5, 8.85e6, 102.8}, {15, 81, 1, 780.41, 7.66e4, 3.82e6, 205.7},
    {45, 253, 1, 780.15, 2.66e5, 1.40e7, 68.5},
};

const ReferenceMode *reference_mode(double diameter, int l, int q)
{
    for (const auto &p : kReferenceModes)
        if (same(p.d_um * 1e-6, diameter) && p.l == l && p.q == q)
            return &p;
    return nullptr;
}

// ---------------------------------------------------------------------------------------------

Result run_modes(const Config &c)
{
    struct Row
    {
        WgmMode m;
        LossBudget b1, b2;
        double g0;
    };
    const AtomParams atom = atom_of(c);
    const auto rows = parallel_map(c.mode_diameters.size(), c.threads, [&](std::size_t i) {
        const DiskGeometry g = with_diameter(c.disk, c.mode_diameters[i]);
        Row r;
        r.m = solve_mode(c.mode_l[i], c.mode_q[i], g, c.wavelength);
        const CouplerModel model(r.m, g, c.width);
        const CouplerMatrix t1 = model.transmission(c.gap);
        const CouplerMatrix t2 = model.transmission(c.gap2);
        r.b1 = mode_budget(r.m, g, &t1, c.surface, c.loss_db_per_km);
        r.b2 = mode_budget(r.m, g, &t2, c.surface, c.loss_db_per_km);
        r.g0 = rabi_frequency(r.m, g, g.radius(), atom) / (2.0 * kPi);
        return r;
    });

    Result res;
    Table t{"modes.csv", {"D_um", "l", "q", "wavelength_nm", "q_wgm", "q_gap1", "q_gap2", "g0_MHz"}, {}};
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        const Row &r = rows[i];
        const double d = c.mode_diameters[i];
        t.rows.push_back({d * 1e6, static_cast<long>(r.m.l), static_cast<long>(r.m.q), r.m.wavelength() * 1e9,
                          r.m.q_wgm(), r.b1.q_total, r.b2.q_total, r.g0 * 1e-6});
        const ReferenceMode *p = reference_mode(d, r.m.l, r.m.q);
        if (!p || !default_disk_material(c))
            continue;
        const std::string tag = fmt_label(" D=%g l=%ld q=%ld", p->d_um, p->l, p->q);
        res.targets.push_back(within("wavelength_nm" + tag, r.m.wavelength() * 1e9, p->lambda_nm - 0.15,
                                     p->lambda_nm + 0.15, p->lambda_nm));
        if (same(c.atom_gamma, kRubidiumD2Gamma))
            res.targets.push_back(within("g0_MHz" + tag, r.g0 * 1e-6, 0.9 * p->g0_mhz, 1.1 * p->g0_mhz, p->g0_mhz));
        if (default_coupler_and_losses(c))
        {
            res.targets.push_back(factor("q_gap1" + tag, r.b1.q_total, p->q1, 3.0));
            res.targets.push_back(factor("q_gap2" + tag, r.b2.q_total, p->q2, 3.0));
        }
        res.targets.push_back(within("q_gap2/q_gap1 > 1" + tag, r.b2.q_total / r.b1.q_total,
                                     std::nextafter(1.0, 2.0), HUGE_VAL, 1.0));
    }
    res.tables.push_back(std::move(t));
    return res;
}

Result run_fsr(const Config &c)
{
    const auto ds = c.effective_scan().grid();
    struct Row
    {
        WgmMode m;
        FreeSpectralRange f;
    };
    const auto rows = parallel_map(ds.size(), c.threads, [&](std::size_t i) {
        const DiskGeometry g = with_diameter(c.disk, ds[i]);
        Row r;
        r.m = pick_mode(c, g, false);
        r.f = free_spectral_range(r.m, g);
        return r;
    });
    Result res;
    Table t{"fsr.csv",
            {"D_um", "l", "q", "wavelength_nm", "fsr_adjacent_nm", "fsr_approx_nm", "fsr_times_D_nm_um"},
            {}};
    std::vector<double> products;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        const Row &r = rows[i];
        const double fsr = r.f.adjacent_lambda.value_or(r.f.approx_lambda);
        t.rows.push_back({ds[i] * 1e6, static_cast<long>(r.m.l), static_cast<long>(r.m.q), r.m.wavelength() * 1e9,
                          r.f.adjacent_lambda ? Cell{*r.f.adjacent_lambda * 1e9} : Cell{std::string()},
                          r.f.approx_lambda * 1e9, fsr * 1e9 * ds[i] * 1e6});
        products.push_back(fsr * ds[i]);
        if (same(ds[i], 30e-6) && r.m.l == 167 && r.m.q == 1 && r.f.adjacent_lambda && default_disk_material(c))
            res.targets.push_back(within("lambda(l=166) - lambda(l=167) nm, D=30", *r.f.adjacent_lambda * 1e9,
                                         4.44, 4.64, 4.54));
    }
    if (products.size() >= 2)
    {
        const auto [lo, hi] = std::minmax_element(products.begin(), products.end());
        res.targets.push_back(within("FSR*D max/min", *hi / *lo, 1.0, 1.1, 1.0));
    }
    res.tables.push_back(std::move(t));
    return res;
}

Result run_q_vs_diameter(const Config &c)
{
    const auto ds = c.effective_scan().grid();
    struct Row
    {
        WgmMode m;
        LossBudget b;
    };
    const auto rows = parallel_map(ds.size(), c.threads, [&](std::size_t i) {
        const DiskGeometry g = with_diameter(c.disk, ds[i]);
        Row r;
        r.m = pick_mode(c, g, false);
        const CouplerMatrix t = CouplerModel(r.m, g, c.width).transmission(c.gap);
        r.b = mode_budget(r.m, g, &t, c.surface, c.loss_db_per_km);
        return r;
    });
    Result res;
    Table t{"q_vs_diameter.csv",
            {"D_um", "l", "wavelength_nm", "q_wgm", "q_mat", "q_surf", "q_coup", "q_total", "finesse",
             "kappa_T_over_kappa_loss"},
            {}};
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        const Row &r = rows[i];
        t.rows.push_back({ds[i] * 1e6, static_cast<long>(r.m.l), r.m.wavelength() * 1e9, r.b.q_wgm, r.b.q_mat,
                          r.b.q_surf, r.b.q_coup ? Cell{*r.b.q_coup} : Cell{std::string()}, r.b.q_total,
                          r.b.finesse, r.b.kappa_T / r.b.kappa_loss});
        if (same(ds[i], 30e-6))
        {
            const double lam = r.m.wavelength();
            const double direct = ds[i] * lam * lam /
                                  (2.0 * c.surface.correlation_length * kPi * kPi * c.surface.sigma * c.surface.sigma);
            res.targets.push_back(within("q_surf / direct formula, D=30", r.b.q_surf / direct, 1.0 - 1e-12,
                                         1.0 + 1e-12, 1.0));
        }
    }
    if (!rows.empty() && same(c.loss_db_per_km, 5.0) && same(c.disk.n_core, 1.454))
        res.targets.push_back(within("q_mat at 5 dB/km", rows.front().b.q_mat, 0.95e10, 1.05e10, 1e10));
    res.tables.push_back(std::move(t));
    return res;
}

Result run_rabi_profile(const Config &c)
{
    const auto ds = c.effective_scan().grid();
    const WgmMode m = pick_mode(c, c.disk);
    const AtomParams atom = atom_of(c);
    const NormalizationIntegral norm = normalization_integral(m, c.disk);
    const double g0 = rabi_frequency(m, c.disk, c.disk.radius(), atom, norm) / (2.0 * kPi);
    const auto gs = parallel_map(ds.size(), c.threads, [&](std::size_t i) {
        return rabi_frequency(m, c.disk, c.disk.radius() + ds[i], atom, norm) / (2.0 * kPi);
    });
    Result res;
    Table t{"rabi_profile.csv", {"distance_nm", "l", "q", "g_MHz", "g_over_g0"}, {}};
    long rises = 0;
    for (std::size_t i = 0; i < ds.size(); ++i)
    {
        t.rows.push_back({ds[i] * 1e9, static_cast<long>(m.l), static_cast<long>(m.q), gs[i] * 1e-6, gs[i] / g0});
        if (i > 0 && ds[i] > ds[i - 1] && gs[i] > gs[i - 1])
            ++rises;
    }
    res.targets.push_back(within("g increases with distance (count)", static_cast<double>(rises), 0.0, 0.0, 0.0));
    const ReferenceMode *p = reference_mode(c.disk.diameter, m.l, m.q);
    if (p && default_disk_material(c) && same(c.atom_gamma, kRubidiumD2Gamma))
        res.targets.push_back(within(fmt_label("g0_MHz D=%g l=%ld q=%ld", p->d_um, p->l, p->q), g0 * 1e-6,
                                     0.9 * p->g0_mhz, 1.1 * p->g0_mhz, p->g0_mhz));
    res.tables.push_back(std::move(t));
    return res;
}

Table scan_table(const std::string &file, const std::string &var, double var_scale, const std::vector<ScanRow> &rows)
{
    Table t{file,
            {var, "signal", "signal_quadrature", "scattered", "m10", "rho11", "q_total", "kappa", "kappa_T",
             "kappa_loss", "strong_coupling", "flags"},
            {}};
    for (const ScanRow &r : rows)
    {
        std::string flags;
        for (const auto &f : r.flags)
            flags += (flags.empty() ? "" : ";") + f;
        t.rows.push_back({r.var * var_scale, r.signal, r.signal_quadrature, r.scattered,
                          r.m10 ? Cell{*r.m10} : Cell{std::string()}, r.rho11, r.q_total, r.kappa, r.kappa_T,
                          r.kappa_loss, r.strong_coupling, flags});
    }
    return t;
}

Result run_detect_pump(const Config &c)
{
    const DetectionModel model(c.detection_setup());
    const auto rows = scan_pump(model, c.effective_scan().grid(), c.threads);
    Result res;
    if (rows.size() >= 3)
    {
        const auto peak = std::max_element(rows.begin(), rows.end(),
                                           [](const ScanRow &a, const ScanRow &b) { return a.signal < b.signal; });
        const double pos = static_cast<double>(peak - rows.begin()) / static_cast<double>(rows.size() - 1);
        res.targets.push_back(within("signal peak position in scan (interior)", pos, 1e-12, 1.0 - 1e-12, 0.5));
        const double gamma_tau = c.atom_gamma * c.tau;
        if (rows.back().var >= 1e11)
            res.targets.push_back(
                within("scattered / (Gamma tau) at top pump", rows.back().scattered / gamma_tau, 0.95, 1.0, 1.0));
    }
    res.tables.push_back(scan_table("detect_pump.csv", "pump_photons_per_s", 1.0, rows));
    return res;
}

struct ReferenceOptimum
{
    double d_um, sigma_nm, lc_nm, m10, strong;
};

constexpr ReferenceOptimum kReferenceOptima[] = {
    {30, 2, 10, 0.85, 48}, {15, 2, 10, 0.49, 73}, {15, 1, 5, 0.13, 290}};

Result run_detect_gap(const Config &c)
{
    const DetectionModel model(c.detection_setup());
    const auto rows = scan_gap(model, c.effective_scan().grid(), c.threads);
    Result res;
    const auto opt = std::find_if(rows.begin(), rows.end(), [](const ScanRow &r) { return r.has_flag("optimum"); });
    const auto crit = std::find_if(rows.begin(), rows.end(), [](const ScanRow &r) { return r.has_flag("critical"); });
    if (crit != rows.end())
    {
        res.targets.push_back(within("signal at critical coupling", crit->signal, 0.0, 0.0, 0.0));
        res.targets.push_back(
            within("critical row flagged divergent", crit->has_flag("divergent") ? 1.0 : 0.0, 1.0, 1.0, 1.0));
    }
    if (opt != rows.end())
    {
        res.targets.push_back(
            within("kappa_T/kappa_loss at optimum", opt->kappa_T / opt->kappa_loss, 3.0, 6.0, 4.5));
        const Config d;
        const bool defaults = default_disk_material(c) && same(c.width, d.width) && same(c.tau, d.tau) &&
                              same(c.pump, d.pump) && same(c.atom_distance, d.atom_distance) &&
                              same(c.detuning_over_gamma, d.detuning_over_gamma) && same(c.atom_gamma, d.atom_gamma) &&
                              same(c.loss_db_per_km, d.loss_db_per_km) && c.epsilon_over_kappa_loss == 0.0;
        for (const auto &p : kReferenceOptima)
            if (defaults && same(c.disk.diameter, p.d_um * 1e-6) && same(c.surface.sigma, p.sigma_nm * 1e-9) &&
                same(c.surface.correlation_length, p.lc_nm * 1e-9))
            {
                res.targets.push_back(factor("min m10", *opt->m10, p.m10, 2.0));
                res.targets.push_back(factor("g^2/(kappa Gamma) at optimum", opt->strong_coupling, p.strong, 2.0));
            }
    }
    res.tables.push_back(scan_table("detect_gap.csv", "gap_um", 1e6, rows));
    return res;
}

Result run_detect_epsilon(const Config &c)
{
    const DetectionModel model(c.detection_setup());
    const auto rows = scan_epsilon(model, c.effective_scan().grid(), c.delta_c, c.threads);
    Result res;
    res.tables.push_back(scan_table("detect_epsilon.csv", "epsilon_over_kappa_loss", 1.0, rows));
    return res;
}

Result run_tuning(const Config &c)
{
    const auto ds = c.effective_scan().grid();
    std::vector<std::pair<double, double>> points; // (n, D), index-major
    for (double n : c.tuning_indices)
        for (double d : ds)
            points.emplace_back(n, d);
    const auto reqs = parallel_map(points.size(), c.threads, [&](std::size_t i) {
        DiskGeometry g = with_diameter(c.disk, points[i].second);
        g.n_core = points[i].first;
        return fsr_scan_requirement(g, c.wavelength, c.fsr_fraction);
    });
    Result res;
    Table t{"tuning.csv", {"D_um", "n", "l", "dD_over_D", "dn_over_n"}, {}};
    auto find = [&](double n, double d) -> const TuningRequirement * {
        for (std::size_t i = 0; i < points.size(); ++i)
            if (same(points[i].first, n) && same(points[i].second, d))
                return &reqs[i];
        return nullptr;
    };
    for (std::size_t i = 0; i < points.size(); ++i)
        t.rows.push_back({points[i].second * 1e6, points[i].first, static_cast<long>(reqs[i].l), reqs[i].dD_over_D,
                          reqs[i].dn_over_n});
    const bool standard = same(c.wavelength, 780e-9) && c.fsr_fraction == 1.0 && same(c.disk.n_clad, 1.0);
    if (standard)
    {
        if (const auto *r = find(1.454, 15e-6))
            res.targets.push_back(within("dn/n for a full FSR, D=15 n=1.454", r->dn_over_n, 0.0075, 0.0125, 0.01));
        if (const auto *r = find(1.454, 30e-6))
            res.targets.push_back(factor("dD/D for a full FSR, D=30 n=1.454", r->dD_over_D, 0.003, 2.0));
    }
    for (double n : c.tuning_indices)
    {
        const auto *a = find(n, 15e-6);
        const auto *b = find(n, 45e-6);
        if (a && b)
            res.targets.push_back(within(fmt_label("requirement ratio D=15/D=45, n=%g", n), a->dD_over_D / b->dD_over_D,
                                         3.0 * 0.95, 3.0 * 1.05, 3.0));
    }
    res.tables.push_back(std::move(t));
    return res;
}

Result run_fdtd_spectrum(const Config &c)
{
    fdtd::Scenario s = c.fdtd;
    s.threads = std::max(s.threads, c.threads);
    const fdtd::Spectrum spec = fdtd::simulate_transmission(s);
    const auto resonances = fdtd::extract_resonances(spec);

    DiskGeometry g = c.disk;
    g.diameter = s.disk_diameter;
    g.n_core = s.n_core;
    g.n_clad = s.n_clad;

    Result res;
    Table ts{"fdtd_spectrum.csv", {"frequency_Hz", "wavelength_nm", "transmission"}, {}};
    double t_max = 0.0;
    for (std::size_t j = 0; j < spec.frequencies.size(); ++j)
    {
        ts.rows.push_back({spec.frequencies[j], kSpeedOfLight / spec.frequencies[j] * 1e9, spec.transmission[j]});
        t_max = std::max(t_max, spec.transmission[j]);
    }
    res.targets.push_back(within("max transmission", t_max, 0.0, 1.0 + 1e-3, 1.0));

    Table tr{"fdtd_resonances.csv",
             {"wavelength_nm", "frequency_Hz", "q_loaded", "depth", "lower_bound", "analytic_l", "analytic_wavelength_nm",
              "relative_offset", "q_cmt"},
             {}};
    if (s.include_disk && s.disk_diameter > 0.0)
        for (const auto &r : resonances)
        {
            const WgmMode m = find_resonance_near(r.wavelength, g, 1);
            const CouplerMatrix t = CouplerModel(m, g, s.waveguide_width).transmission(s.gap);
            const double q_cmt = mode_budget(m, g, &t, c.surface, c.loss_db_per_km).q_total;
            const double offset = (r.wavelength - m.wavelength()) / m.wavelength();
            tr.rows.push_back({r.wavelength * 1e9, r.frequency, r.q_loaded, r.depth, static_cast<long>(r.lower_bound),
                               static_cast<long>(m.l), m.wavelength() * 1e9, offset, q_cmt});
            const std::string tag = fmt_label(" l=%g", static_cast<double>(m.l));
            res.targets.push_back(within("|relative offset| from analytic" + tag, std::abs(offset), 0.0, 0.01, 0.0));
            res.targets.push_back(factor("q_loaded / q_cmt" + tag, r.q_loaded / q_cmt, 1.0, 2.0));
        }
    res.tables.push_back(std::move(ts));
    res.tables.push_back(std::move(tr));
    return res;
}

void check_scan_values(const Config &c, const std::vector<double> &v)
{
    for (double x : v)
    {
        if (!std::isfinite(x))
            throw ValidationError("scan", "values must be finite");
        switch (c.kind)
        {
        case Kind::fsr:
        case Kind::q_vs_diameter:
        case Kind::tuning:
            if (!(x > 0.0))
                throw ValidationError("scan", "diameters must be positive");
            break;
        default:
            if (!(x >= 0.0))
                throw ValidationError("scan", "values must be non-negative");
        }
    }
}

} // namespace

// ---------------------------------------------------------------------------------------------

const std::vector<CatalogEntry> &catalog()
{
    static const std::vector<CatalogEntry> entries{
        {Kind::modes, "modes", "mode table: wavelength, Q at coupler.gap and coupler.gap2, g0 per (D, l, q) row", ""},
        {Kind::fsr, "fsr", "free spectral range of the mode nearest mode.wavelength", "disk diameter, m"},
        {Kind::q_vs_diameter, "q-vs-diameter", "loss budget (radiation, material, surface, coupling) versus diameter",
         "disk diameter, m"},
        {Kind::fdtd_spectrum, "fdtd-spectrum", "FDTD transmission spectrum with Lorentzian resonance fits (fdtd.*)", ""},
        {Kind::rabi_profile, "rabi-profile", "single-photon Rabi frequency versus atom distance from the rim",
         "distance from the rim, m"},
        {Kind::detect_pump, "detect-pump", "homodyne signal, scattering and m10 versus pump rate",
         "pump |A_in|^2, photons/s"},
        {Kind::detect_gap, "detect-gap", "detection figures versus waveguide gap; flags optimum and critical rows",
         "gap, m"},
        {Kind::detect_epsilon, "detect-epsilon", "detection figures versus mode splitting epsilon/kappa_loss",
         "epsilon / kappa_loss"},
        {Kind::tuning, "tuning", "relative diameter or index change for a full FSR scan versus diameter",
         "disk diameter, m"},
    };
    return entries;
}

std::string kind_name(Kind k)
{
    for (const auto &e : catalog())
        if (e.kind == k)
            return e.name;
    return "?";
}

std::vector<double> ScanRange::grid() const
{
    if (!values.empty())
        return values;
    std::vector<double> g;
    if (points <= 0)
        return g;
    if (points == 1)
        return {start};
    for (int i = 0; i < points; ++i)
    {
        const double u = static_cast<double>(i) / (points - 1);
        if (log_spacing)
            g.push_back(std::exp(std::log(start) + u * (std::log(stop) - std::log(start))));
        else
            g.push_back(start + u * (stop - start));
    }
    g.front() = start;
    g.back() = stop;
    return g;
}

ScanRange Config::effective_scan() const
{
    if (scan)
        return *scan;
    ScanRange r;
    switch (kind)
    {
    case Kind::fsr:
        r.values = {15e-6, 30e-6, 45e-6};
        break;
    case Kind::q_vs_diameter:
        r.start = 10e-6, r.stop = 50e-6, r.points = 9;
        break;
    case Kind::rabi_profile:
        r.start = 0.0, r.stop = 300e-9, r.points = 31;
        break;
    case Kind::detect_pump:
        r.start = 1e6, r.stop = 1e12, r.points = 61, r.log_spacing = true;
        break;
    case Kind::detect_gap:
        r.start = 0.05e-6, r.stop = 1.2e-6, r.points = 93;
        break;
    case Kind::detect_epsilon:
        r.start = 0.0, r.stop = 10.0, r.points = 101;
        break;
    case Kind::tuning:
        r.start = 5e-6, r.stop = 50e-6, r.points = 46;
        break;
    default:
        break;
    }
    return r;
}

DetectionSetup Config::detection_setup() const
{
    DetectionSetup s;
    s.disk = disk;
    s.l = l;
    s.q = q;
    s.target_wavelength = wavelength;
    s.width = width;
    s.gap = gap;
    s.surface = surface;
    s.loss_db_per_km = loss_db_per_km;
    s.atom = atom_of(*this);
    s.atom_distance = atom_distance;
    s.tau = tau;
    s.pump = pump;
    s.epsilon_over_kappa_loss = epsilon_over_kappa_loss;
    s.delta_c = delta_c;
    return s;
}

void Config::validate() const
{
    if (threads < 1 || threads > 256)
        throw ValidationError("threads", "must lie in [1, 256]");
    disk.validate();
    surface.validate();
    if (!(loss_db_per_km > 0.0))
        throw ValidationError("losses.db_per_km", "must be positive");
    if (l < 0)
        throw ValidationError("mode.l", "must be >= 0");
    if (q < 1)
        throw ValidationError("mode.q", "must be >= 1");
    if (!(wavelength >= 600e-9 && wavelength <= 1700e-9))
        throw ValidationError("mode.wavelength", "must lie in [600, 1700] nm");
    if (!(width >= 0.2e-6 && width <= 2.0e-6))
        throw ValidationError("coupler.width", "must lie in [0.2, 2.0] um");
    if (!(gap >= 0.0) || !std::isfinite(gap))
        throw ValidationError("coupler.gap", "must be non-negative");
    if (!(gap2 >= 0.0) || !std::isfinite(gap2))
        throw ValidationError("coupler.gap2", "must be non-negative");
    if (!(atom_distance >= 0.0))
        throw ValidationError("atom.distance", "must be non-negative");
    atom_of(*this).validate();

    if (has_scan(kind))
    {
        const ScanRange r = effective_scan();
        if (r.values.empty())
        {
            if (r.points < 1)
                throw ValidationError("scan", "empty scan range");
            if (!std::isfinite(r.start) || !std::isfinite(r.stop))
                throw ValidationError("scan.start", "must be finite");
            if (r.points > 1 && !(r.stop > r.start))
                throw ValidationError("scan.stop", "empty scan range: stop must exceed start");
            if (r.log_spacing && !(r.start > 0.0))
                throw ValidationError("scan.start", "log spacing needs a positive start");
            if (r.points > 100000)
                throw ValidationError("scan.points", "at most 100000 points");
        }
        check_scan_values(*this, r.grid());
    }
    else if (scan)
        throw ValidationError("scan", "experiment " + kind_name(kind) + " takes no scan");

    switch (kind)
    {
    case Kind::modes:
        if (mode_diameters.empty())
            throw ValidationError("modes.diameters", "empty mode list");
        if (mode_l.size() != mode_diameters.size())
            throw ValidationError("modes.l", "needs one entry per diameter");
        if (mode_q.size() != mode_diameters.size())
            throw ValidationError("modes.q", "needs one entry per diameter");
        for (std::size_t i = 0; i < mode_diameters.size(); ++i)
        {
            if (!(mode_diameters[i] > 0.0))
                throw ValidationError("modes.diameters", "must be positive");
            if (mode_l[i] < 1)
                throw ValidationError("modes.l", "must be >= 1");
            if (mode_q[i] < 1)
                throw ValidationError("modes.q", "must be >= 1");
        }
        break;
    case Kind::detect_pump:
    case Kind::detect_gap:
    case Kind::detect_epsilon:
        detection_setup().validate();
        break;
    case Kind::tuning:
        if (tuning_indices.empty())
            throw ValidationError("tuning.indices", "empty index list");
        for (double n : tuning_indices)
            if (!(n > disk.n_clad))
                throw ValidationError("tuning.indices", "must exceed geometry.n_clad");
        if (!(fsr_fraction > 0.0) || !std::isfinite(fsr_fraction))
            throw ValidationError("tuning.fsr_fraction", "must be positive");
        break;
    case Kind::fdtd_spectrum:
        fdtd.validate();
        if (!fdtd.include_disk || !fdtd.include_waveguide)
            throw ValidationError("fdtd.include_disk", "the spectrum experiment needs both disk and waveguide");
        break;
    default:
        break;
    }
}

std::string Config::canonical() const
{
    std::ostringstream o;
    for (const Field &f : fields())
    {
        // thread count never changes results, so it stays out of the hash
        if (f.key.rfind("scan.", 0) == 0 || f.key == "threads")
            continue;
        o << f.key << " = " << f.get(*this) << "\n";
    }
    if (has_scan(kind))
    {
        const ScanRange r = effective_scan();
        if (!r.values.empty())
            o << "scan.values = " << join(r.values) << "\n";
        else
            o << "scan.start = " << num17(r.start) << "\nscan.stop = " << num17(r.stop)
              << "\nscan.points = " << r.points << "\nscan.spacing = " << (r.log_spacing ? "log" : "linear") << "\n";
    }
    std::istringstream fd(fdtd::format_scenario(fdtd));
    std::string line;
    while (std::getline(fd, line))
        if (line.rfind("threads ", 0) != 0)
            o << "fdtd." << line << "\n";
    return o.str();
}

std::string Config::hash() const
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical())
    {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Config parse_config(const std::string &text)
{
    Config c;
    c.mode_diameters.clear();
    for (const auto &p : kReferenceModes)
    {
        c.mode_diameters.push_back(p.d_um * 1e-6);
        c.mode_l.push_back(p.l);
        c.mode_q.push_back(p.q);
    }

    std::istringstream in(text);
    std::string line, fdtd_text;
    std::set<std::string> seen;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("line " + std::to_string(lineno), "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw ValidationError(key, "given more than once");
        if (key.rfind("fdtd.", 0) == 0)
        {
            fdtd_text += key.substr(5) + " = " + value + "\n";
            continue;
        }
        const auto it = std::find_if(fields().begin(), fields().end(), [&](const Field &f) { return f.key == key; });
        if (it == fields().end())
            throw ValidationError(key, "unknown key");
        it->set(c, value);
    }
    if (!seen.count("experiment"))
        throw ValidationError("experiment", "missing");
    try
    {
        c.fdtd = fdtd::parse_scenario(fdtd_text);
    }
    catch (const ValidationError &e)
    {
        if (e.key().rfind("fdtd.", 0) == 0)
            throw;
        const std::string what = e.what();
        throw ValidationError("fdtd." + e.key(), what.substr(std::min(what.size(), e.key().size() + 2)));
    }
    c.validate();
    return c;
}

Config load_config(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw ValidationError("config", "cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

bool Result::pass() const
{
    return std::all_of(targets.begin(), targets.end(), [](const Target &t) { return t.pass; });
}

Result run(const Config &config)
{
    config.validate();
    const std::string name = kind_name(config.kind);
    try
    {
        switch (config.kind)
        {
        case Kind::modes:
            return run_modes(config);
        case Kind::fsr:
            return run_fsr(config);
        case Kind::q_vs_diameter:
            return run_q_vs_diameter(config);
        case Kind::fdtd_spectrum:
            return run_fdtd_spectrum(config);
        case Kind::rabi_profile:
            return run_rabi_profile(config);
        case Kind::detect_pump:
            return run_detect_pump(config);
        case Kind::detect_gap:
            return run_detect_gap(config);
        case Kind::detect_epsilon:
            return run_detect_epsilon(config);
        case Kind::tuning:
            return run_tuning(config);
        }
    }
    catch (const ValidationError &e)
    {
        throw ValidationError(e.key(), "experiment " + name + ": " + e.what());
    }
    catch (const Error &e)
    {
        throw ExperimentError("experiment " + name + ": " + e.what());
    }
    throw ExperimentError("experiment " + name + ": not implemented");
}

std::string format_table(const Table &t, const std::string &config_hash)
{
    std::string out = "# config_hash=" + config_hash + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out += (i ? "," : "") + t.columns[i];
    out += "\n";
    char buf[40];
    for (const auto &row : t.rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
        {
            if (i)
                out += ",";
            if (const double *d = std::get_if<double>(&row[i]))
            {
                std::snprintf(buf, sizeof buf, "%.9e", *d);
                out += buf;
            }
            else if (const long *n = std::get_if<long>(&row[i]))
                out += std::to_string(*n);
            else
                out += std::get<std::string>(row[i]);
        }
        out += "\n";
    }
    return out;
}

std::string format_summary(const Config &config, const Result &result)
{
    nlohmann::ordered_json j;
    j["config_hash"] = config.hash();
    j["experiment"] = kind_name(config.kind);
    j["pass"] = result.pass();
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto &t : result.tables)
        files.push_back({{"file", t.file}, {"rows", t.rows.size()}});
    j["outputs"] = files;
    nlohmann::ordered_json targets = nlohmann::ordered_json::array();
    auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
    for (const auto &t : result.targets)
        targets.push_back({{"name", t.name},
                           {"value", finite_or_null(t.value)},
                           {"lower", finite_or_null(t.lower)},
                           {"upper", finite_or_null(t.upper)},
                           {"reference", finite_or_null(t.reference)},
                           {"pass", t.pass}});
    j["targets"] = targets;
    nlohmann::ordered_json cfg;
    std::istringstream in(config.canonical());
    std::string line;
    while (std::getline(in, line))
    {
        const auto eq = line.find(" = ");
        cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["config"] = cfg;
    return j.dump(2) + "\n";
}

std::vector<std::string> write_outputs(const Config &config, const Result &result, const std::filesystem::path &dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const std::string h = config.hash();
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto &t : result.tables)
        files.emplace_back(t.file, format_table(t, h));
    files.emplace_back("summary.json", format_summary(config, result));
    std::vector<std::string> names;
    for (const auto &[name, body] : files)
    {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f)
            throw IoError("cannot write " + (dir / name).string());
        f << body;
        if (!f)
            throw IoError("write failed for " + (dir / name).string());
        names.push_back(name);
    }
    return names;
}

} // namespace microdisk::experiment
