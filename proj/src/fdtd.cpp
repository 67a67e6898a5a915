#include "microdisk/fdtd.hpp"

#include "microdisk/constants.hpp"
#include "microdisk/coupler.hpp"
#include "microdisk/errors.hpp"
#include "text_fields.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

namespace microdisk::fdtd
{

namespace
{

constexpr double kTimeStepMin = 4.45e-17;
constexpr double kTimeStepMax = 1.78e-16;
constexpr double kCellMin = 0.02e-6;
constexpr double kCellMax = 0.08e-6;

double courant_limit(double cell) { return cell / (kSpeedOfLight * std::sqrt(2.0)); }

using detail::to_bool;
using detail::to_double;
using detail::to_long;
using detail::trim;

} // namespace

double Scenario::resolved_time_step() const
{
    if (time_step > 0.0)
        return time_step;
    return std::min(0.99 * courant_limit(cell), kTimeStepMax);
}

long Scenario::resolved_steps() const
{
    if (steps > 0)
        return steps;
    return static_cast<long>(std::ceil(total_time / resolved_time_step()));
}

void Scenario::validate() const
{
    if (!(cell >= kCellMin * (1 - 1e-12) && cell <= kCellMax * (1 + 1e-12)))
        throw ValidationError("fdtd.cell", "must lie in [0.02, 0.08] um");
    const double dt = resolved_time_step();
    if (dt > courant_limit(cell))
        throw ValidationError("fdtd.time_step", "violates the 2D Courant bound cell/(c sqrt 2)");
    if (dt < kTimeStepMin * (1 - 1e-12) || dt > kTimeStepMax * (1 + 1e-12))
        throw ValidationError("fdtd.time_step", "must lie in [4.45e-17, 1.78e-16] s");
    if (pml_cells < 8)
        throw ValidationError("fdtd.pml_cells", "absorber needs at least 8 cells");
    if (!(pml_reflection > 0.0 && pml_reflection < 1.0))
        throw ValidationError("fdtd.pml_reflection", "must lie in (0, 1)");
    if (pml_order < 1 || pml_order > 6)
        throw ValidationError("fdtd.pml_order", "must lie in [1, 6]");
    if (include_disk && !(disk_diameter > 0.0))
        throw ValidationError("fdtd.disk_diameter", "must be positive");
    if (!(disk_diameter >= 0.0))
        throw ValidationError("fdtd.disk_diameter", "must be non-negative");
    if (!(n_core > n_clad && n_clad >= 1.0))
        throw ValidationError("fdtd.n_core", "require n_core > n_clad >= 1");
    if (!(waveguide_width > 0.0))
        throw ValidationError("fdtd.waveguide_width", "must be positive");
    if (!(gap > 0.0))
        throw ValidationError("fdtd.gap", "must be positive");
    if (!(padding >= 2.0 * cell) || !(lead >= 4.0 * cell))
        throw ValidationError("fdtd.padding", "padding and lead must span a few cells");
    if (averaging_samples < 1 || averaging_samples > 64)
        throw ValidationError("fdtd.averaging_samples", "must lie in [1, 64]");
    if (!(lambda_min > 0.0 && lambda_max > lambda_min))
        throw ValidationError("fdtd.lambda_min", "need 0 < lambda_min < lambda_max");
    if (!(center_wavelength > 0.0))
        throw ValidationError("fdtd.center_wavelength", "must be positive");
    if (!(pulse_duration > 0.0) || !(cw_ramp > 0.0))
        throw ValidationError("fdtd.pulse_duration", "must be positive");
    if (n_freq < 2)
        throw ValidationError("fdtd.n_freq", "need at least two frequencies");
    if (dft_stride < 1 || record_stride < 1)
        throw ValidationError("fdtd.dft_stride", "strides must be >= 1");
    // DFT sampling must resolve the highest probe frequency
    if (dft_stride * dt * (kSpeedOfLight / lambda_min) > 0.45)
        throw ValidationError("fdtd.dft_stride", "too coarse for the shortest probe wavelength");
    if (!(flux_margin >= 0.0))
        throw ValidationError("fdtd.flux_margin", "must be non-negative");
    if (resolved_steps() < 1)
        throw ValidationError("fdtd.steps", "run length must be positive");
    if (threads < 1)
        throw ValidationError("fdtd.threads", "must be >= 1");
}

namespace
{

using Setter = std::function<void(Scenario &, const std::string &, const std::string &)>;

const std::map<std::string, Setter> &setters()
{
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto dbl = [&t](const std::string &k, double Scenario::*m) {
            t[k] = [m](Scenario &s, const std::string &key, const std::string &v) { s.*m = to_double(key, v); };
        };
        auto integer = [&t](const std::string &k, int Scenario::*m) {
            t[k] = [m](Scenario &s, const std::string &key, const std::string &v) {
                s.*m = static_cast<int>(to_long(key, v));
            };
        };
        auto boolean = [&t](const std::string &k, bool Scenario::*m) {
            t[k] = [m](Scenario &s, const std::string &key, const std::string &v) { s.*m = to_bool(key, v); };
        };
        dbl("disk_diameter", &Scenario::disk_diameter);
        dbl("n_core", &Scenario::n_core);
        dbl("n_clad", &Scenario::n_clad);
        dbl("waveguide_width", &Scenario::waveguide_width);
        dbl("gap", &Scenario::gap);
        boolean("include_disk", &Scenario::include_disk);
        boolean("include_waveguide", &Scenario::include_waveguide);
        boolean("periodic_x", &Scenario::periodic_x);
        dbl("cell", &Scenario::cell);
        dbl("time_step", &Scenario::time_step);
        integer("pml_cells", &Scenario::pml_cells);
        dbl("pml_reflection", &Scenario::pml_reflection);
        integer("pml_order", &Scenario::pml_order);
        dbl("padding", &Scenario::padding);
        dbl("lead", &Scenario::lead);
        integer("averaging_samples", &Scenario::averaging_samples);
        t["source"] = [](Scenario &s, const std::string &key, const std::string &v) {
            if (v == "pulse")
                s.source = SourceKind::pulse;
            else if (v == "cw")
                s.source = SourceKind::cw;
            else
                throw ValidationError(key, "expected pulse or cw, got '" + v + "'");
        };
        dbl("center_wavelength", &Scenario::center_wavelength);
        dbl("pulse_duration", &Scenario::pulse_duration);
        dbl("cw_ramp", &Scenario::cw_ramp);
        boolean("reverse", &Scenario::reverse);
        dbl("lambda_min", &Scenario::lambda_min);
        dbl("lambda_max", &Scenario::lambda_max);
        integer("n_freq", &Scenario::n_freq);
        integer("dft_stride", &Scenario::dft_stride);
        dbl("flux_margin", &Scenario::flux_margin);
        t["steps"] = [](Scenario &s, const std::string &key, const std::string &v) { s.steps = to_long(key, v); };
        dbl("total_time", &Scenario::total_time);
        integer("record_stride", &Scenario::record_stride);
        integer("threads", &Scenario::threads);
        return t;
    }();
    return table;
}

} // namespace

Scenario parse_scenario(const std::string &text)
{
    Scenario s;
    std::istringstream in(text);
    std::string line;
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
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ValidationError(key, "unknown scenario key");
        it->second(s, key, value);
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw ValidationError("scenario", "cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str());
}

std::string format_scenario(const Scenario &s)
{
    std::ostringstream o;
    char buf[64];
    auto num = [&](const char *k, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        o << k << " = " << buf << "\n";
    };
    auto flag = [&](const char *k, bool v) { o << k << " = " << (v ? "true" : "false") << "\n"; };
    num("disk_diameter", s.disk_diameter);
    num("n_core", s.n_core);
    num("n_clad", s.n_clad);
    num("waveguide_width", s.waveguide_width);
    num("gap", s.gap);
    flag("include_disk", s.include_disk);
    flag("include_waveguide", s.include_waveguide);
    flag("periodic_x", s.periodic_x);
    num("cell", s.cell);
    num("time_step", s.time_step);
    num("pml_cells", s.pml_cells);
    num("pml_reflection", s.pml_reflection);
    num("pml_order", s.pml_order);
    num("padding", s.padding);
    num("lead", s.lead);
    num("averaging_samples", s.averaging_samples);
    o << "source = " << (s.source == SourceKind::pulse ? "pulse" : "cw") << "\n";
    num("center_wavelength", s.center_wavelength);
    num("pulse_duration", s.pulse_duration);
    num("cw_ramp", s.cw_ramp);
    flag("reverse", s.reverse);
    num("lambda_min", s.lambda_min);
    num("lambda_max", s.lambda_max);
    num("n_freq", s.n_freq);
    num("dft_stride", s.dft_stride);
    num("flux_margin", s.flux_margin);
    num("steps", static_cast<double>(s.steps));
    num("total_time", s.total_time);
    num("record_stride", s.record_stride);
    num("threads", s.threads);
    return o.str();
}

// ---------------------------------------------------------------------------------------------

struct Simulation::Pool
{
    explicit Pool(int n, Simulation &sim)
        : sim(sim), count(n), start(n), done(n)
    {
        for (int t = 1; t < n; ++t)
            workers.emplace_back([this, t] { loop(t); });
    }

    ~Pool()
    {
        stop = true;
        start.arrive_and_wait();
        for (auto &w : workers)
            w.join();
    }

    void loop(int t)
    {
        for (;;)
        {
            start.arrive_and_wait();
            if (stop)
                return;
            slice(t);
            done.arrive_and_wait();
        }
    }

    void slice(int t)
    {
        const int rows = sim.nz_;
        const int b = static_cast<int>(static_cast<long>(rows) * t / count);
        const int e = static_cast<int>(static_cast<long>(rows) * (t + 1) / count);
        if (phase == 0)
            sim.update_h(b, e);
        else
            sim.update_e(b, e);
    }

    void run(int ph)
    {
        phase = ph;
        start.arrive_and_wait();
        slice(0);
        done.arrive_and_wait();
    }

    Simulation &sim;
    int count;
    std::barrier<> start, done;
    std::vector<std::thread> workers;
    std::atomic<bool> stop{false};
    int phase = 0;
};

Simulation::Simulation(const Scenario &s) : sc_(s)
{
    sc_.validate();
    dx_ = sc_.cell;
    dt_ = sc_.resolved_time_step();
    build_grid();
    build_pml();
    build_source();
    if (sc_.threads > 1)
        pool_ = new Pool(std::min(sc_.threads, nz_), *this);
}

Simulation::~Simulation() { delete pool_; }

void Simulation::build_grid()
{
    const double R = sc_.radius();
    const double w = sc_.waveguide_width;
    const double x_wg = R + sc_.gap + 0.5 * w;
    const double x_lo = -R - sc_.padding;
    const double x_hi = x_wg + 0.5 * w + sc_.padding;
    const double z_half = R + sc_.padding + sc_.lead;
    const int p = sc_.pml_cells;
    const int px = sc_.periodic_x ? 0 : p;
    nx_ = static_cast<int>(std::ceil((x_hi - x_lo) / dx_)) + 1 + 2 * px;
    nz_ = static_cast<int>(std::ceil(2.0 * z_half / dx_)) + 1 + 2 * p;
    if (nz_ % 2 == 0)
        ++nz_; // keep the grid symmetric about z = 0
    x0_ = x_lo - px * dx_;
    z0_ = -0.5 * (nz_ - 1) * dx_;

    const std::size_t n = static_cast<std::size_t>(nx_) * nz_;
    ey_.assign(n, 0.0);
    hx_.assign(n, 0.0);
    hz_.assign(n, 0.0);
    eps_.assign(n, 1.0);
    ce_.assign(n, 0.0);

    const double e_core = sc_.n_core * sc_.n_core;
    const double e_clad = sc_.n_clad * sc_.n_clad;
    const int m = sc_.averaging_samples;
    auto inside = [&](double x, double z) {
        if (sc_.include_waveguide && std::abs(x - x_wg) < 0.5 * w)
            return true;
        return sc_.include_disk && x * x + z * z < R * R;
    };
    for (int k = 0; k < nz_; ++k)
        for (int i = 0; i < nx_; ++i)
        {
            const double xc = x_at(i), zc = z_at(k);
            // cells away from every interface need no sub-sampling
            const double h = 0.75 * dx_;
            const bool near_guide = sc_.include_waveguide && std::abs(std::abs(xc - x_wg) - 0.5 * w) < h;
            const bool near_disk = sc_.include_disk && std::abs(std::hypot(xc, zc) - R) < h;
            double frac;
            if (!near_guide && !near_disk)
                frac = inside(xc, zc) ? 1.0 : 0.0;
            else
            {
                int hits = 0;
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b)
                        hits += inside(xc + ((a + 0.5) / m - 0.5) * dx_, zc + ((b + 0.5) / m - 0.5) * dx_);
                frac = static_cast<double>(hits) / (m * m);
            }
            eps_[idx(i, k)] = e_clad + frac * (e_core - e_clad);
            ce_[idx(i, k)] = dt_ / (kEps0 * eps_[idx(i, k)] * dx_);
        }

    // flux window and planes
    flux_i0_ = std::max(px + 1, static_cast<int>(std::floor((x_wg - 0.5 * w - sc_.flux_margin - x0_) / dx_)));
    flux_i1_ = std::min(nx_ - px - 1, static_cast<int>(std::ceil((x_wg + 0.5 * w + sc_.flux_margin - x0_) / dx_)) + 1);
    const double dir = sc_.reverse ? -1.0 : 1.0;
    const double z_src = -dir * (R + sc_.padding);
    k_source_ = static_cast<int>(std::lround((z_src - z0_) / dx_));
    const int shift = std::max(2, static_cast<int>(std::lround(0.5 * sc_.lead / dx_)));
    in_plane_.k = k_source_ + static_cast<int>(dir) * shift;
    out_plane_.k = static_cast<int>(std::lround((dir * (R + sc_.padding) - z0_) / dx_));
    in_plane_.z = z_at(in_plane_.k);
    out_plane_.z = z_at(out_plane_.k);

    const double f_lo = kSpeedOfLight / sc_.lambda_max;
    const double f_hi = kSpeedOfLight / sc_.lambda_min;
    freqs_.resize(sc_.n_freq);
    for (int j = 0; j < sc_.n_freq; ++j)
        freqs_[j] = f_lo + (f_hi - f_lo) * j / (sc_.n_freq - 1);
    const std::size_t nf = static_cast<std::size_t>(sc_.n_freq) * (flux_i1_ - flux_i0_);
    for (FluxPlane *pl : {&in_plane_, &out_plane_})
    {
        pl->e.assign(nf, 0.0);
        pl->h.assign(nf, 0.0);
    }
    probe_i_ = static_cast<int>(std::lround((x_wg - x0_) / dx_));
    probe_k_ = out_plane_.k;
}

void Simulation::build_pml()
{
    const int p = sc_.pml_cells;
    const double d = p * dx_;
    const double m = sc_.pml_order;
    const double sigma_max = -(m + 1.0) * std::log(sc_.pml_reflection) / (2.0 * kEta0 * d);
    const double alpha_max = 0.05 * 2.0 * kPi * (kSpeedOfLight / sc_.center_wavelength) * kEps0;

    auto coeffs = [&](double depth, double &b, double &a) {
        if (depth <= 0.0)
        {
            b = 0.0;
            a = 0.0;
            return;
        }
        const double r = std::min(depth / d, 1.0);
        const double sigma = sigma_max * std::pow(r, m);
        const double alpha = alpha_max * (1.0 - r);
        b = std::exp(-(sigma + alpha) * dt_ / kEps0);
        a = sigma > 0.0 ? sigma / (sigma + alpha) * (b - 1.0) : 0.0;
    };
    auto profile = [&](int n, double offset, std::vector<double> &b, std::vector<double> &a) {
        b.assign(n, 0.0);
        a.assign(n, 0.0);
        for (int i = 0; i < n; ++i)
        {
            const double pos = i + offset;
            const double depth = std::max(p - pos, pos - (n - 1 - p)) * dx_;
            coeffs(depth, b[i], a[i]);
        }
    };
    profile(nx_, 0.0, bx_e_, ax_e_);
    profile(nx_, 0.5, bx_h_, ax_h_);
    if (sc_.periodic_x)
    {
        std::fill(ax_e_.begin(), ax_e_.end(), 0.0);
        std::fill(ax_h_.begin(), ax_h_.end(), 0.0);
    }
    profile(nz_, 0.0, bz_e_, az_e_);
    profile(nz_, 0.5, bz_h_, az_h_);

    const std::size_t n = static_cast<std::size_t>(nx_) * nz_;
    psi_ey_x_.assign(n, 0.0);
    psi_ey_z_.assign(n, 0.0);
    psi_hz_x_.assign(n, 0.0);
    psi_hx_z_.assign(n, 0.0);
}

void Simulation::build_source()
{
    source_profile_.assign(nx_, 0.0);
    const int i0 = sc_.periodic_x ? 0 : sc_.pml_cells;
    const int i1 = sc_.periodic_x ? nx_ : nx_ - sc_.pml_cells;
    if (sc_.include_waveguide)
    {
        const SlabMode slab =
            solve_slab_mode(sc_.waveguide_width, sc_.n_core, sc_.n_clad, sc_.center_wavelength);
        const double x_wg = sc_.radius() + sc_.gap + 0.5 * sc_.waveguide_width;
        for (int i = i0; i < i1; ++i)
            source_profile_[i] = slab.profile(x_at(i) - x_wg);
    }
    else
        std::fill(source_profile_.begin() + i0, source_profile_.begin() + i1, 1.0);
    omega0_ = 2.0 * kPi * kSpeedOfLight / sc_.center_wavelength;
    // intensity FWHM T: field envelope exp(-a t^2) with a = 2 ln 2 / T^2
    env_a_ = 2.0 * std::log(2.0) / (sc_.pulse_duration * sc_.pulse_duration);
    t0_ = 4.5 / std::sqrt(env_a_);
}

double Simulation::source_amplitude(double t) const
{
    if (sc_.source == SourceKind::pulse)
    {
        const double u = t - t0_;
        return std::exp(-env_a_ * u * u) * std::sin(omega0_ * u);
    }
    const double ramp = t < sc_.cw_ramp ? 0.5 * (1.0 - std::cos(kPi * t / sc_.cw_ramp)) : 1.0;
    return ramp * std::sin(omega0_ * t);
}

void Simulation::update_h(int k_begin, int k_end)
{
    const double ch = dt_ / (kMu0 * dx_);
    const double cp = dt_ / kMu0;
    const int p = sc_.pml_cells;
    for (int k = k_begin; k < k_end; ++k)
    {
        const double *e0 = &ey_[idx(0, k)];
        double *hz = &hz_[idx(0, k)];
        for (int i = 0; i + 1 < nx_; ++i)
            hz[i] -= ch * (e0[i + 1] - e0[i]);
        if (sc_.periodic_x)
            hz[nx_ - 1] -= ch * (e0[0] - e0[nx_ - 1]);
        // x-absorber columns
        double *psi = &psi_hz_x_[idx(0, k)];
        auto hz_psi = [&](int i) {
            psi[i] = bx_h_[i] * psi[i] + ax_h_[i] * (e0[i + 1] - e0[i]) / dx_;
            hz[i] -= cp * psi[i];
        };
        for (int i = 0; i < p + 1 && i + 1 < nx_; ++i)
            hz_psi(i);
        for (int i = std::max(p + 1, nx_ - p - 2); i + 1 < nx_; ++i)
            hz_psi(i);

        if (k + 1 >= nz_)
            continue;
        const double *e1 = &ey_[idx(0, k + 1)];
        double *hx = &hx_[idx(0, k)];
        for (int i = 0; i < nx_; ++i)
            hx[i] += ch * (e1[i] - e0[i]);
        if (az_h_[k] != 0.0)
        {
            double *ps = &psi_hx_z_[idx(0, k)];
            const double b = bz_h_[k], a = az_h_[k];
            for (int i = 0; i < nx_; ++i)
            {
                ps[i] = b * ps[i] + a * (e1[i] - e0[i]) / dx_;
                hx[i] += cp * ps[i];
            }
        }
    }
}

void Simulation::update_e(int k_begin, int k_end)
{
    const int p = sc_.pml_cells;
    for (int k = std::max(1, k_begin); k < std::min(nz_ - 1, k_end); ++k)
    {
        double *e = &ey_[idx(0, k)];
        const double *c = &ce_[idx(0, k)];
        const double *hx1 = &hx_[idx(0, k)];
        const double *hx0 = &hx_[idx(0, k - 1)];
        const double *hz = &hz_[idx(0, k)];
        for (int i = 1; i + 1 < nx_; ++i)
            e[i] += c[i] * ((hx1[i] - hx0[i]) - (hz[i] - hz[i - 1]));
        if (sc_.periodic_x)
        {
            e[0] += c[0] * ((hx1[0] - hx0[0]) - (hz[0] - hz[nx_ - 1]));
            e[nx_ - 1] += c[nx_ - 1] * ((hx1[nx_ - 1] - hx0[nx_ - 1]) - (hz[nx_ - 1] - hz[nx_ - 2]));
        }
        double *px = &psi_ey_x_[idx(0, k)];
        auto ey_psi_x = [&](int i) {
            px[i] = bx_e_[i] * px[i] + ax_e_[i] * (hz[i] - hz[i - 1]) / dx_;
            e[i] -= c[i] * dx_ * px[i];
        };
        for (int i = 1; i <= p && i + 1 < nx_; ++i)
            ey_psi_x(i);
        for (int i = std::max(p + 1, nx_ - 1 - p); i + 1 < nx_; ++i)
            ey_psi_x(i);
        if (az_e_[k] != 0.0)
        {
            double *pz = &psi_ey_z_[idx(0, k)];
            const double b = bz_e_[k], a = az_e_[k];
            const int i_end = sc_.periodic_x ? nx_ : nx_ - 1;
            for (int i = sc_.periodic_x ? 0 : 1; i < i_end; ++i)
            {
                pz[i] = b * pz[i] + a * (hx1[i] - hx0[i]) / dx_;
                e[i] += c[i] * dx_ * pz[i];
            }
        }
    }
}

void Simulation::accumulate_dft()
{
    const double te = step_ * dt_;
    const double th = (step_ - 0.5) * dt_;
    const int w = flux_i1_ - flux_i0_;
    for (FluxPlane *pl : {&in_plane_, &out_plane_})
    {
        const int k = pl->k;
        for (int j = 0; j < sc_.n_freq; ++j)
        {
            const double om = 2.0 * kPi * freqs_[j];
            const cplx pe = std::polar(1.0, -om * te);
            const cplx ph = std::polar(1.0, -om * th);
            cplx *ef = &pl->e[static_cast<std::size_t>(j) * w];
            cplx *hf = &pl->h[static_cast<std::size_t>(j) * w];
            for (int i = flux_i0_; i < flux_i1_; ++i)
            {
                // H_x lives at z_{k +- 1/2}; average onto the E_y row
                const double hx = 0.5 * (hx_[idx(i, k)] + hx_[idx(i, k - 1)]);
                ef[i - flux_i0_] += ey_[idx(i, k)] * pe;
                hf[i - flux_i0_] += hx * ph;
            }
        }
    }
}

double Simulation::interior_energy() const
{
    const int p = sc_.pml_cells;
    const int px = sc_.periodic_x ? 0 : p;
    double u = 0.0;
    for (int k = p; k < nz_ - p; ++k)
        for (int i = px; i < nx_ - px; ++i)
        {
            const std::size_t n = idx(i, k);
            u += kEps0 * eps_[n] * ey_[n] * ey_[n] + kMu0 * (hx_[n] * hx_[n] + hz_[n] * hz_[n]);
        }
    return 0.5 * u * dx_ * dx_;
}

void Simulation::check_finite() const
{
    for (double v : ey_)
        if (!std::isfinite(v))
            throw InstabilityError("non-finite E_y field", step_);
}

void Simulation::advance(long n)
{
    for (long s = 0; s < n; ++s)
    {
        if (pool_)
        {
            pool_->run(0);
            pool_->run(1);
        }
        else
        {
            update_h(0, nz_);
            update_e(0, nz_);
        }
        ++step_;
        const double amp = source_amplitude(step_ * dt_);
        double *row = &ey_[idx(0, k_source_)];
        for (int i = 0; i < nx_; ++i)
            row[i] += amp * source_profile_[i];

        if (step_ % sc_.dft_stride == 0)
            accumulate_dft();
        if (step_ % sc_.record_stride == 0)
        {
            probe_ey_.push_back(ey_[idx(probe_i_, probe_k_)]);
            probe_hx_.push_back(0.5 * (hx_[idx(probe_i_, probe_k_)] + hx_[idx(probe_i_, probe_k_ - 1)]));
            energy_.push_back(interior_energy());
        }
        if (step_ % 256 == 0 && !std::isfinite(ey_[idx(probe_i_, probe_k_)]))
            check_finite();
    }
    check_finite();
}

std::vector<double> FluxPlane::power(const std::vector<double> &freqs, double dx, int nx, double sign) const
{
    std::vector<double> p(freqs.size(), 0.0);
    for (std::size_t j = 0; j < freqs.size(); ++j)
    {
        double acc = 0.0;
        for (int i = 0; i < nx; ++i)
            acc += (e[j * nx + i] * std::conj(h[j * nx + i])).real();
        // S_z = -E_y H_x for the TE field
        p[j] = -sign * 0.5 * acc * dx;
    }
    return p;
}

FieldRecord Simulation::record() const
{
    FieldRecord r;
    r.frequencies = freqs_;
    const int w = flux_i1_ - flux_i0_;
    const double sign = sc_.reverse ? -1.0 : 1.0;
    r.input_power = in_plane_.power(freqs_, dx_, w, sign);
    r.output_power = out_plane_.power(freqs_, dx_, w, sign);
    r.probe_ey = probe_ey_;
    r.probe_hx = probe_hx_;
    r.energy = energy_;
    r.record_stride = sc_.record_stride;
    r.steps = step_;
    r.time_step = dt_;
    r.duration = step_ * dt_;
    r.nx = nx_;
    r.nz = nz_;
    r.cell = dx_;
    return r;
}

void Simulation::write_snapshot(const std::string &path_prefix) const
{
    {
        std::ofstream bin(path_prefix + ".bin", std::ios::binary);
        if (!bin)
            throw IoError("cannot write " + path_prefix + ".bin");
        bin.write(reinterpret_cast<const char *>(ey_.data()), static_cast<std::streamsize>(ey_.size() * sizeof(double)));
    }
    nlohmann::ordered_json h;
    h["field"] = "Ey";
    h["dtype"] = "float64";
    h["byte_order"] = "little";
    h["layout"] = "row-major, z index slowest";
    h["nx"] = nx_;
    h["nz"] = nz_;
    h["cell_m"] = dx_;
    h["x0_m"] = x0_;
    h["z0_m"] = z0_;
    h["step"] = step_;
    h["time_s"] = step_ * dt_;
    std::ofstream js(path_prefix + ".json");
    if (!js)
        throw IoError("cannot write " + path_prefix + ".json");
    js << h.dump(2) << "\n";
}

FieldRecord run(const Scenario &s)
{
    Simulation sim(s);
    sim.advance(s.resolved_steps());
    return sim.record();
}

Spectrum transmission_spectrum(const FieldRecord &run, const FieldRecord *reference)
{
    if (reference == nullptr)
        throw NormalizationError("transmission needs a disk-free reference run");
    if (reference->frequencies != run.frequencies)
        throw NormalizationError("reference run uses a different frequency grid");
    Spectrum s;
    s.frequencies = run.frequencies;
    s.transmission.resize(run.frequencies.size());
    s.duration = std::min(run.duration, reference->duration);
    for (std::size_t j = 0; j < run.frequencies.size(); ++j)
    {
        const double ref = reference->output_power[j];
        if (!(ref > 0.0))
            throw NormalizationError("reference flux vanishes inside the probe band");
        s.transmission[j] = run.output_power[j] / ref;
    }
    return s;
}

Spectrum simulate_transmission(const Scenario &s)
{
    Scenario ref = s;
    ref.include_disk = false;
    const FieldRecord a = run(s);
    const FieldRecord b = run(ref);
    return transmission_spectrum(a, &b);
}

void write_spectrum_csv(const Spectrum &s, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot write " + path);
    f << "frequency_Hz,transmission\n";
    char buf[64];
    for (std::size_t j = 0; j < s.frequencies.size(); ++j)
    {
        std::snprintf(buf, sizeof buf, "%.9e,%.9e\n", s.frequencies[j], s.transmission[j]);
        f << buf;
    }
}

} // namespace microdisk::fdtd
