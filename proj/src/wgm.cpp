#include "microdisk/wgm.hpp"

#include "microdisk/constants.hpp"
#include "microdisk/errors.hpp"
#include "microdisk/numerics/bessel.hpp"
#include "microdisk/numerics/quadrature.hpp"
#include "microdisk/numerics/root_finding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace microdisk
{

namespace
{

using numerics::ScaledComplex;
using numerics::converged_integral;

double airy_zero(int q)
{
    static constexpr std::array<double, 8> zeros = {2.338107410, 4.087949444, 5.520559828, 6.786708090,
                                                    7.944133587, 9.022650853, 10.04017434, 11.00852430};
    if (q >= 1 && q <= static_cast<int>(zeros.size()))
        return zeros[q - 1];
    const double t = 3.0 * kPi / 8.0 * (4.0 * q - 1.0);
    return std::pow(t, 2.0 / 3.0) * (1.0 + 5.0 / 48.0 / (t * t));
}

bool is_finite(cplx v)
{
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// Residual in terms of the size parameter x = k R.
cplx residual_x(cplx x, int l, const DiskGeometry &g)
{
    const cplx zc = x * g.n_core;
    const cplx zcl = x * g.n_clad;
    cplx jr, hr;
    try
    {
        jr = numerics::bessel_j_ratio(l, zc);
        hr = numerics::hankel1_ratio(l, zcl);
    }
    catch (const RangeError &)
    {
        throw PoleError("Bessel ratio undefined at this wavenumber");
    }
    if (!is_finite(jr) || !is_finite(hr))
        throw PoleError("dispersion relation denominator vanished");
    return g.n_core * jr - g.n_clad * hr;
}

double decay_constant(const WgmMode &mode, const DiskGeometry &g, double r)
{
    const double beta = mode.l / r;
    const double kk = mode.k_r() * g.n_clad;
    return beta > kk ? std::sqrt(beta * beta - kk * kk) : 0.0;
}

} // namespace

void DiskGeometry::validate() const
{
    if (!(diameter > 0.0) || !std::isfinite(diameter))
        throw ValidationError("geometry.diameter", "must be positive");
    if (!(height > 0.0) || !std::isfinite(height))
        throw ValidationError("geometry.height", "must be positive");
    if (!(n_clad >= 1.0))
        throw ValidationError("geometry.n_clad", "must be >= 1");
    if (!(n_core > n_clad))
        throw ValidationError("geometry.n_core", "must exceed the cladding index");
}

double WgmMode::wavelength() const
{
    return 2.0 * kPi / k_r();
}

double WgmMode::omega() const
{
    return kSpeedOfLight * k_r();
}

cplx dispersion_residual(cplx k, int l, const DiskGeometry &geom)
{
    if (l < 1)
        throw RangeError("l must be >= 1");
    if (!(k.real() > 0.0))
        throw RangeError("Re k must be positive");
    return residual_x(k * geom.radius(), l, geom);
}

double asymptotic_size_parameter(int l, int q, const DiskGeometry &geom)
{
    const double m = geom.n_core / geom.n_clad;
    const double a = airy_zero(q);
    const double nu = l;
    const double ncx = nu + std::pow(2.0, -1.0 / 3.0) * a * std::cbrt(nu) - m / std::sqrt(m * m - 1.0) +
                       0.3 * std::pow(2.0, -2.0 / 3.0) * a * a / std::cbrt(nu);
    return ncx / geom.n_core;
}

int count_radial_extrema(int l, double k_r, const DiskGeometry &geom)
{
    const double u_end = k_r * geom.n_core * geom.radius();
    const double du = kPi / 40.0;
    // |J_l(u)| is monotonic below its first maximum near u = l
    const double u_start = std::min(0.9 * l, u_end);
    int count = 0;
    double prev2 = -1.0, prev1 = -1.0;
    for (double u = u_start; u <= u_end + 1e-12; u += du)
    {
        const ScaledComplex js = numerics::bessel_j_scaled(l, u);
        const double v = std::abs(js.value());
        if (prev2 >= 0.0 && prev1 > prev2 && prev1 > v)
            ++count;
        prev2 = prev1;
        prev1 = v;
    }
    return count;
}

WgmMode solve_mode(int l, int q, const DiskGeometry &geom, double lambda_seed)
{
    geom.validate();
    if (l < 1)
        throw RangeError("l must be >= 1");
    if (q < 1)
        throw RangeError("q must be >= 1");
    if (!(lambda_seed > 0.0))
        throw RangeError("seed wavelength must be positive");

    const double radius = geom.radius();
    auto f = [&](cplx x) { return residual_x(x, l, geom); };
    numerics::RootOptions opts;
    opts.max_step = 0.5;

    // Try the asymptotic (l, q) estimate first, then the caller's wavelength.
    const std::array<double, 2> seeds = {asymptotic_size_parameter(l, q, geom), 2.0 * kPi / lambda_seed * radius};
    int found_q = -1;
    std::optional<ConvergenceError> last_failure;
    for (double x0 : seeds)
    {
        numerics::RootResult r;
        try
        {
            r = numerics::find_complex_root(f, cplx(x0, 0.0), kResidualTolerance, opts);
        }
        catch (const ConvergenceError &e)
        {
            last_failure = e;
            continue;
        }
        const cplx k = r.root / radius;
        if (!(k.real() > 0.0))
            continue;
        found_q = count_radial_extrema(l, k.real(), geom);
        if (found_q == q)
        {
            WgmMode mode;
            mode.l = l;
            mode.q = q;
            mode.k = k;
            mode.iterations = r.iterations;
            return mode;
        }
    }
    if (found_q < 0 && last_failure)
        throw *last_failure;
    throw RetargetingError("solver converged to radial order " + std::to_string(found_q) + " instead of " +
                               std::to_string(q),
                           q, found_q);
}

cplx mode_field(const WgmMode &mode, const DiskGeometry &geom, double r)
{
    const double radius = geom.radius();
    if (r == radius)
        return {1.0, 0.0};
    if (r < 0.0)
        throw RangeError("radius must be non-negative");
    if (r < radius)
    {
        const ScaledComplex num = numerics::bessel_j_scaled(mode.l, mode.k * geom.n_core * r);
        const ScaledComplex den = numerics::bessel_j_scaled(mode.l, mode.k * geom.n_core * radius);
        return num.ratio(den);
    }
    const ScaledComplex num = numerics::hankel1_scaled(mode.l, mode.k * geom.n_clad * r);
    const ScaledComplex den = numerics::hankel1_scaled(mode.l, mode.k * geom.n_clad * radius);
    return num.ratio(den);
}

NormalizationIntegral normalization_integral(const WgmMode &mode, const DiskGeometry &geom)
{
    const double radius = geom.radius();
    const double nc2 = geom.n_core * geom.n_core;
    const double ncl2 = geom.n_clad * geom.n_clad;

    // The inner field is negligible well inside the caustic r = l / (n_c k).
    const double caustic = mode.l / (geom.n_core * mode.k_r());
    const double r_in = std::max(0.0, std::min(0.5 * caustic, radius));
    auto inner = [&](double r) { return r * nc2 * std::norm(mode_field(mode, geom, r)); };
    const double i_in = converged_integral(inner, r_in, radius, "inner normalization integral");

    const double gamma_ev = decay_constant(mode, geom, radius);
    if (!(gamma_ev > 0.0))
        throw AccuracyError("mode has no evanescent region outside the disk");
    const double r_out = radius + 10.0 / gamma_ev;
    auto outer = [&](double r) { return r * ncl2 * std::norm(mode_field(mode, geom, r)); };
    const double i_out = converged_integral(outer, radius, r_out, "outer normalization integral");

    NormalizationIntegral out;
    out.outer_radius = r_out;
    // Beyond r_out the field decays at least as fast as exp(-2 gamma (r - r_out)) while
    // still evanescent; the tail is then bounded by r_out n^2 |E|^2 / (2 gamma) (1 + 1/(2 gamma r_out)).
    const double g_out = decay_constant(mode, geom, r_out);
    const double e_out = ncl2 * std::norm(mode_field(mode, geom, r_out));
    if (g_out > 0.0)
        out.tail_bound = e_out * (r_out / (2.0 * g_out) + 1.0 / (4.0 * g_out * g_out));
    out.value = i_in + i_out + out.tail_bound;
    return out;
}

double rabi_frequency(const WgmMode &mode, const DiskGeometry &geom, double atom_r, const AtomParams &atom,
                      const NormalizationIntegral &norm)
{
    if (atom_r < geom.radius())
        throw RangeError("atom must sit outside the disk (r >= R)");
    const double omega = mode.omega();
    const double c = kSpeedOfLight;
    const double e = std::abs(mode_field(mode, geom, atom_r));
    return e * std::sqrt(3.0 * atom.gamma * c * c * c / (omega * omega * geom.height * norm.value));
}

double rabi_frequency(const WgmMode &mode, const DiskGeometry &geom, double atom_r, const AtomParams &atom)
{
    return rabi_frequency(mode, geom, atom_r, atom, normalization_integral(mode, geom));
}

FreeSpectralRange free_spectral_range(const WgmMode &mode, const DiskGeometry &geom)
{
    FreeSpectralRange out;
    out.approx_omega = kSpeedOfLight * mode.k_r() / mode.l;
    out.approx_lambda = mode.wavelength() / mode.l;
    if (mode.l < 2)
        return out;
    try
    {
        const WgmMode prev = solve_mode(mode.l - 1, mode.q, geom, mode.wavelength() + out.approx_lambda);
        out.adjacent_omega = kSpeedOfLight * (mode.k_r() - prev.k_r());
        out.adjacent_lambda = prev.wavelength() - mode.wavelength();
        out.adjacent_found = true;
    }
    catch (const Error &)
    {
        out.adjacent_found = false;
    }
    return out;
}

WgmMode find_resonance_near(double lambda_target, const DiskGeometry &geom, int q)
{
    geom.validate();
    if (!(lambda_target >= 600e-9 && lambda_target <= 1700e-9))
        throw RangeError("target wavelength outside [600, 1700] nm");
    const double x_target = 2.0 * kPi / lambda_target * geom.radius();
    const int l_geo = static_cast<int>(std::ceil(kPi * geom.diameter * geom.n_core / lambda_target));

    // Rank the window below the geometric estimate by asymptotic wavelength.
    std::vector<std::pair<double, int>> ranked;
    for (int l = std::max(1, static_cast<int>(0.5 * l_geo)); l <= l_geo + 1; ++l)
    {
        const double x = asymptotic_size_parameter(l, q, geom);
        ranked.emplace_back(std::abs(x - x_target), l);
    }
    if (ranked.empty())
        throw SearchError("empty mode search window");
    std::sort(ranked.begin(), ranked.end());

    std::optional<WgmMode> best;
    const int candidates = std::min<int>(3, static_cast<int>(ranked.size()));
    for (int i = 0; i < candidates; ++i)
    {
        const int l = ranked[i].second;
        try
        {
            const WgmMode m = solve_mode(l, q, geom, lambda_target);
            if (!best || std::abs(m.wavelength() - lambda_target) < std::abs(best->wavelength() - lambda_target))
                best = m;
        }
        catch (const Error &)
        {
        }
    }
    if (!best)
        throw SearchError("no mode of radial order " + std::to_string(q) + " found near the target");
    if (std::abs(best->wavelength() - lambda_target) > 0.5 * best->wavelength() / best->l * 1.05)
        throw SearchError("nearest mode lies more than half a free spectral range from the target");
    return *best;
}

} // namespace microdisk
