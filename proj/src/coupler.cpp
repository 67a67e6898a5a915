#include "microdisk/coupler.hpp"

#include "microdisk/constants.hpp"
#include "microdisk/errors.hpp"
#include "microdisk/numerics/quadrature.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace microdisk
{

namespace
{

constexpr double kTableStep = 2e-9;
constexpr int kCouplingSamples = 401;

double gauss_panels(const auto &f, double a, double b, int panels)
{
    return numerics::composite_gauss(f, a, b, panels);
}

} // namespace

double SlabMode::profile(double s) const
{
    const double a = std::abs(s);
    const double half = 0.5 * width;
    if (a <= half)
        return std::cos(kappa * a);
    return std::cos(kappa * half) * std::exp(-gamma * (a - half));
}

double SlabMode::power_norm() const
{
    const double half = 0.5 * width;
    const double c = std::cos(kappa * half);
    // 2 [ int_0^{w/2} cos^2 + c^2 / (2 gamma) ]
    const double core = half + std::sin(2.0 * kappa * half) / (2.0 * kappa);
    return core + c * c / gamma;
}

SlabMode solve_slab_mode(double width, double n_core, double n_clad, double wavelength)
{
    if (!(width > 0.0) || !(wavelength > 0.0) || !(n_core > n_clad))
        throw NoModeError("slab has no guided mode for these parameters");
    const double k = 2.0 * kPi / wavelength;
    const double v = 0.5 * k * width * std::sqrt(n_core * n_core - n_clad * n_clad);
    if (v >= kPi)
        throw MultimodeError("slab guides more than one even TE mode (V >= pi)");

    // Even TE: u tan u = sqrt(V^2 - u^2), u = kappa w / 2 in (0, min(V, pi/2)).
    auto f = [v](double u) { return u * std::tan(u) - std::sqrt(std::max(0.0, v * v - u * u)); };
    double lo = 0.0;
    double hi = std::min(v, 0.5 * kPi * (1.0 - 1e-15));
    if (!(f(hi) > 0.0))
        throw NoModeError("even slab mode not bracketed");
    auto tol = [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::max(std::abs(a), std::abs(b)); };
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f(lo), f(hi), tol, iters);
    const double u = 0.5 * (a + b);

    SlabMode m;
    m.width = width;
    m.k = k;
    m.kappa = 2.0 * u / width;
    m.n_eff = std::sqrt(n_core * n_core - std::pow(m.kappa / k, 2));
    if (!(m.n_eff > n_clad))
        throw NoModeError("slab mode below cutoff");
    m.beta = m.n_eff * k;
    m.gamma = k * std::sqrt(m.n_eff * m.n_eff - n_clad * n_clad);
    return m;
}

void CouplerGeometry::validate() const
{
    disk.validate();
    if (!(gap >= 0.0) || !std::isfinite(gap))
        throw ValidationError("coupler.gap", "must be non-negative");
    if (!(width >= 0.2e-6 && width <= 2.0e-6))
        throw ValidationError("coupler.width", "must lie in [0.2, 2.0] um");
}

double kappa_T(const CouplerMatrix &t)
{
    return t.t12_abs2() / (2.0 * t.round_trip_time);
}

std::optional<double> q_coup(const CouplerMatrix &t, int l)
{
    const double t2 = t.t12_abs2();
    if (t2 == 0.0)
        return std::nullopt;
    return 2.0 * kPi * l / t2;
}

CouplerModel::CouplerModel(const WgmMode &mode, const DiskGeometry &disk, double width)
    : CouplerModel(mode, disk, solve_slab_mode(width, disk.n_core, disk.n_clad, mode.wavelength()))
{
}

CouplerModel::CouplerModel(const WgmMode &mode, const DiskGeometry &disk, const SlabMode &slab)
    : mode_(mode), disk_(disk), width_(slab.width), slab_(slab)
{
    disk_.validate();
    const double radius = disk_.radius();
    const double caustic = mode_.l / (disk_.n_core * mode_.k_r());
    const double kk = mode_.k_r() * disk_.n_clad;
    const double beta_rim = mode_.l / radius;
    if (!(beta_rim > kk))
        throw NoModeError("WGM has no evanescent tail at the rim");
    const double gamma_w = std::sqrt(beta_rim * beta_rim - kk * kk);

    r_lo_ = std::max(0.0, std::min(0.5 * caustic, radius - 40.0 / slab_.gamma));
    r_hi_ = radius + 50.0 / gamma_w;
    const int n = static_cast<int>(std::ceil((r_hi_ - r_lo_) / kTableStep)) + 1;
    dr_ = (r_hi_ - r_lo_) / (n - 1);
    table_.resize(n);
    for (int i = 0; i < n; ++i)
        table_[i] = mode_field(mode_, disk_, r_lo_ + i * dr_).real();

    // Simpson on the table grid
    double sum = 0.0;
    const int m = (n - 1) / 2 * 2;
    for (int i = 0; i + 2 <= m; i += 2)
        sum += table_[i] * table_[i] + 4.0 * table_[i + 1] * table_[i + 1] + table_[i + 2] * table_[i + 2];
    wgm_norm_ = sum * dr_ / 3.0;
    slab_norm_ = slab_.power_norm();
}

double CouplerModel::wgm_profile(double r) const
{
    if (r <= r_lo_ || r >= r_hi_)
        return 0.0;
    const double t = (r - r_lo_) / dr_;
    const int i = std::min(static_cast<int>(t), static_cast<int>(table_.size()) - 4);
    const int i0 = std::max(0, i - 1);
    // 4-point Lagrange interpolation on the uniform table
    const double x = t - i0;
    const double y0 = table_[i0], y1 = table_[i0 + 1], y2 = table_[i0 + 2], y3 = table_[i0 + 3];
    return y0 * (x - 1) * (x - 2) * (x - 3) / -6.0 + y1 * x * (x - 2) * (x - 3) / 2.0 +
           y2 * x * (x - 1) * (x - 3) / -2.0 + y3 * x * (x - 1) * (x - 2) / 6.0;
}

double CouplerModel::coupling_coefficient(double z, double gap) const
{
    const double radius = disk_.radius();
    const double w = width_;
    const double local_gap = gap + z * z / disk_.diameter;
    const double centre = radius + local_gap + 0.5 * w;
    auto overlap = [&](double r) { return wgm_profile(r) * slab_.profile(r - centre); };

    // WGM tail inside the waveguide core, and slab tail inside the disk
    const double i_wg = gauss_panels(overlap, radius + local_gap, radius + local_gap + w, 4);
    const double disk_lo = std::max(r_lo_, radius - 40.0 / slab_.gamma);
    const double i_disk = gauss_panels(overlap, disk_lo, radius, 24);

    const double k = mode_.k_r();
    const double dn2 = disk_.n_core * disk_.n_core - disk_.n_clad * disk_.n_clad;
    const double beta_w = mode_.l / radius;
    const double pref = k * k * dn2 / (2.0 * std::sqrt(slab_.beta * beta_w));
    return pref * 0.5 * (i_wg + i_disk) / std::sqrt(slab_norm_ * wgm_norm_);
}

double CouplerModel::coupling_window(double gap, const CouplerOptions &options) const
{
    const double radius = disk_.radius();
    const double c0 = coupling_coefficient(0.0, gap);
    double z = std::sqrt(disk_.diameter * mode_.wavelength());
    const double cap = 0.95 * radius;
    z = std::min(z, cap);
    while (z < cap && std::abs(coupling_coefficient(z, gap)) > options.edge_threshold * std::abs(c0))
        z = std::min(1.25 * z, cap);
    return z;
}

CouplerMatrix CouplerModel::transmission(double gap, const CouplerOptions &options) const
{
    if (!(gap >= 0.0))
        throw ValidationError("coupler.gap", "must be non-negative");
    const double radius = disk_.radius();
    const double z_max = coupling_window(gap, options);

    std::vector<double> c_table(kCouplingSamples);
    const double hz = z_max / (kCouplingSamples - 1);
    for (int i = 0; i < kCouplingSamples; ++i)
        c_table[i] = coupling_coefficient(i * hz, gap);
    const double c0 = c_table.front();
    const boost::math::interpolators::cardinal_cubic_b_spline<double> c_spline(c_table.begin(), c_table.end(),
                                                                                0.0, hz, 0.0);
    auto coupling = [&](double z) {
        const double a = std::abs(z);
        return a >= z_max ? c_table.back() : c_spline(a);
    };

    const double beta_lin = slab_.beta;
    const int l = mode_.l;
    const bool matched = options.phase_matched;
    // interaction picture: phase mismatch theta(z) = beta_lin z - l asin(z/R)
    auto theta = [&](double z) { return matched ? 0.0 : beta_lin * z - l * std::asin(z / radius); };

    using state = std::array<double, 8>;
    auto rhs = [&](const state &y, state &dy, double z) {
        const double cz = coupling(z);
        const double th = theta(z);
        const cplx ph(std::cos(th), std::sin(th));
        for (int col = 0; col < 2; ++col)
        {
            const cplx b1(y[4 * col], y[4 * col + 1]);
            const cplx b2(y[4 * col + 2], y[4 * col + 3]);
            const cplx d1 = cplx(0.0, cz) * b2 * ph;
            const cplx d2 = cplx(0.0, cz) * b1 * std::conj(ph);
            dy[4 * col] = d1.real();
            dy[4 * col + 1] = d1.imag();
            dy[4 * col + 2] = d2.real();
            dy[4 * col + 3] = d2.imag();
        }
    };

    namespace ode = boost::numeric::odeint;
    state y = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0};
    double drift = 0.0;
    auto observer = [&](const state &s, double) {
        for (int col = 0; col < 2; ++col)
        {
            const double p = s[4 * col] * s[4 * col] + s[4 * col + 1] * s[4 * col + 1] +
                             s[4 * col + 2] * s[4 * col + 2] + s[4 * col + 3] * s[4 * col + 3];
            drift = std::max(drift, std::abs(p - 1.0));
        }
    };
    try
    {
        auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<state>>(options.atol, options.rtol);
        ode::integrate_adaptive(stepper, rhs, y, -z_max, z_max, z_max / 200.0, observer);
    }
    catch (const std::exception &e)
    {
        throw IntegrationError(std::string("coupled-mode integration failed: ") + e.what());
    }

    const cplx a11(y[0], y[1]), a21(y[2], y[3]); // waveguide input
    const cplx a12(y[4], y[5]), a22(y[6], y[7]); // WGM input

    CouplerMatrix t;
    t.t12_abs_raw = std::abs(a21);
    t.t21_abs_raw = std::abs(a12);
    const double cross = 0.5 * (t.t12_abs_raw + t.t21_abs_raw);
    t.t11 = std::abs(a11);
    t.t22 = std::abs(a22);
    t.t12 = cplx(0.0, cross);
    t.t21 = t.t12;
    t.l = l;
    t.k_r = mode_.k_r();
    t.round_trip_time = 2.0 * kPi * l / (kSpeedOfLight * mode_.k_r());
    t.power_drift = drift;
    t.z_max = z_max;
    t.edge_ratio = c0 != 0.0 ? std::abs(c_table.back() / c0) : 0.0;
    return t;
}

double coupling_coefficient(double z, const SlabMode &slab, const WgmMode &mode, const CouplerGeometry &geom)
{
    geom.validate();
    const CouplerModel model(mode, geom.disk, slab);
    return model.coupling_coefficient(z, geom.gap);
}

CouplerMatrix transmission_matrix(const SlabMode &slab, const WgmMode &mode, const CouplerGeometry &geom,
                                  const CouplerOptions &options)
{
    geom.validate();
    const CouplerModel model(mode, geom.disk, slab);
    return model.transmission(geom.gap, options);
}

} // namespace microdisk
