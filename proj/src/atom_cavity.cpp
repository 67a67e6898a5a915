#include "microdisk/atom_cavity.hpp"

#include "microdisk/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace microdisk
{

namespace
{

constexpr int kScanIntervals = 500; // 1e-3 resolution on [0, 1/2]

struct Reduced
{
    // alpha = alpha0 + alpha1 rho10 and G = G0 + G1 rho10
    Eigen::Vector2cd alpha0, alpha1;
    cplx G0, G1;
    cplx atom_pole; // -Gamma + i Delta_a
    double gamma;
};

Reduced reduce(const CavitySystem &sys, const AtomParams &atom)
{
    Eigen::Matrix2cd m;
    const cplx diag(-sys.kappa, sys.delta_c);
    m << diag, -sys.epsilon, std::conj(sys.epsilon), diag;
    const Eigen::Vector2cd eta(sys.eta_plus(), sys.eta_minus());
    const Eigen::Vector2cd g(sys.g_plus, sys.g_minus);
    const Eigen::PartialPivLU<Eigen::Matrix2cd> lu(m);
    Reduced r;
    r.alpha0 = -lu.solve(eta);
    r.alpha1 = lu.solve(g);
    r.G0 = std::conj(g[0]) * r.alpha0[0] + std::conj(g[1]) * r.alpha0[1];
    r.G1 = std::conj(g[0]) * r.alpha1[0] + std::conj(g[1]) * r.alpha1[1];
    r.atom_pole = cplx(-atom.gamma, atom.detuning);
    r.gamma = atom.gamma;
    return r;
}

cplx rho10_of(const Reduced &r, double rho11)
{
    const double w = 1.0 - 2.0 * rho11;
    return -r.G0 * w / (r.atom_pole + r.G1 * w);
}

double population_balance(const Reduced &r, double rho11)
{
    const cplx p = rho10_of(r, rho11);
    const cplx G = r.G0 + r.G1 * p;
    return -2.0 * r.gamma * rho11 + 2.0 * (std::conj(G) * p).real();
}

double refine_root(const Reduced &r, double lo, double hi, double flo)
{
    double fl = flo;
    for (int i = 0; i < 80 && hi - lo > 1e-17; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        const double fm = population_balance(r, mid);
        if ((fm > 0.0) == (fl > 0.0))
        {
            lo = mid;
            fl = fm;
        }
        else
        {
            hi = mid;
        }
    }
    // one secant step inside the final bracket
    const double fh = population_balance(r, hi);
    if (fh != fl)
    {
        const double s = lo - fl * (hi - lo) / (fh - fl);
        if (s >= lo && s <= hi)
            return s;
    }
    return 0.5 * (lo + hi);
}

} // namespace

cplx CavitySystem::eta_plus() const
{
    return t21 * a_in_plus / std::sqrt(round_trip_time);
}

cplx CavitySystem::eta_minus() const
{
    return t21 * a_in_minus / std::sqrt(round_trip_time);
}

void CavitySystem::validate() const
{
    if (!(kappa > 0.0))
        throw ValidationError("cavity.kappa", "must be positive");
    if (!(kappa_T >= 0.0) || kappa_T > kappa * (1.0 + 1e-12))
        throw ConsistencyError("require kappa >= kappa_T >= 0");
    if (!(round_trip_time > 0.0))
        throw ValidationError("cavity.round_trip_time", "must be positive");
    for (cplx t : {t11, t12, t21})
        if (!std::isfinite(t.real()) || !std::isfinite(t.imag()))
            throw ValidationError("cavity.coupler", "non-finite coupler matrix entry");
}

void set_atom_coupling(CavitySystem &sys, double g, int l, double azimuth)
{
    const double ph = l * azimuth;
    sys.g_plus = g * cplx(std::cos(ph), -std::sin(ph));
    sys.g_minus = g * cplx(std::cos(ph), std::sin(ph));
}

StateDerivative equations_of_motion(const CavitySystem &sys, const AtomParams &atom, cplx ap, cplx am,
                                    cplx rho10, double rho11)
{
    const cplx diag(-sys.kappa, sys.delta_c);
    const cplx G = std::conj(sys.g_plus) * ap + std::conj(sys.g_minus) * am;
    StateDerivative d;
    d.d_alpha_plus = diag * ap - sys.g_plus * rho10 + sys.eta_plus() - sys.epsilon * am;
    d.d_alpha_minus = diag * am - sys.g_minus * rho10 + sys.eta_minus() + std::conj(sys.epsilon) * ap;
    d.d_rho10 = cplx(-atom.gamma, atom.detuning) * rho10 + G * (1.0 - 2.0 * rho11);
    d.d_rho11 = -2.0 * atom.gamma * rho11 + 2.0 * (std::conj(G) * rho10).real();
    return d;
}

SteadyState steady_state(const CavitySystem &sys, const AtomParams &atom)
{
    sys.validate();
    atom.validate();
    const Reduced r = reduce(sys, atom);

    SteadyState s;
    std::vector<double> roots;
    if (r.G0 == cplx(0.0, 0.0))
    {
        roots.push_back(0.0);
    }
    else
    {
        double x0 = 0.0;
        double f0 = population_balance(r, x0);
        if (f0 == 0.0)
            roots.push_back(0.0);
        for (int i = 1; i <= kScanIntervals; ++i)
        {
            const double x1 = 0.5 * i / kScanIntervals;
            const double f1 = population_balance(r, x1);
            if (f1 == 0.0)
                roots.push_back(x1);
            else if (f0 != 0.0 && (f0 > 0.0) != (f1 > 0.0))
                roots.push_back(refine_root(r, x0, x1, f0));
            x0 = x1;
            f0 = f1;
        }
    }
    if (roots.empty())
        throw PhysicalityError("population equation has no root in [0, 1/2]");
    s.root_count = static_cast<int>(roots.size());
    s.bistable = s.root_count > 1;
    s.rho11 = roots.front();
    s.rho10 = rho10_of(r, s.rho11);
    const Eigen::Vector2cd alpha = r.alpha0 + r.alpha1 * s.rho10;
    s.alpha_plus = alpha[0];
    s.alpha_minus = alpha[1];
    const double srt = std::sqrt(sys.round_trip_time);
    s.a_out_plus = sys.t11 * sys.a_in_plus + sys.t12 / srt * s.alpha_plus;
    s.a_out_minus = sys.t11 * sys.a_in_minus + sys.t12 / srt * s.alpha_minus;
    if (s.rho11 < 0.0 || s.rho11 > 0.5 || std::norm(s.rho10) > s.rho11 * (1.0 - s.rho11) * (1.0 + 1e-9) + 1e-300)
        throw PhysicalityError("stationary state violates positivity");
    return s;
}

DetectionMetrics detection_metrics(const CavitySystem &sys, const AtomParams &atom, double tau)
{
    if (!(tau > 0.0))
        throw ValidationError("detection.tau", "must be positive");
    DetectionMetrics m;
    m.tau = tau;
    m.with_atom = steady_state(sys, atom);
    CavitySystem empty = sys;
    empty.g_plus = empty.g_minus = 0.0;
    m.without_atom = steady_state(empty, atom);
    m.bistable = m.with_atom.bistable;

    const cplx a = m.with_atom.a_out_plus;
    const cplx a0 = m.without_atom.a_out_plus;
    m.a_out0_abs = std::abs(a0);
    m.scattered = 2.0 * atom.gamma * tau * m.with_atom.rho11;
    const double threshold = 1e-9 * std::abs(sys.a_in_plus);
    if (m.a_out0_abs <= threshold || std::abs(a) == 0.0)
    {
        // no reference phase: the waveguide is dark at critical coupling
        m.divergent = true;
        return m;
    }
    m.phi = std::arg(a);
    m.phi0 = std::arg(a0);
    const double sin_dphi = std::abs(std::sin(std::arg(a / a0)));
    m.signal = 2.0 * std::sqrt(tau) * m.a_out0_abs * sin_dphi;
    m.signal_quadrature = 2.0 * std::sqrt(tau) * std::abs(a) * sin_dphi;
    if (m.signal > 0.0)
        m.m10 = 100.0 * m.scattered / (m.signal * m.signal);
    else
        m.divergent = true;
    return m;
}

AnalyticMetrics analytic_approximations(const CavitySystem &sys, const AtomParams &atom, double tau)
{
    const double a = std::abs(sys.a_in_plus);
    const double g2 = std::norm(sys.g_plus);
    const double k2 = sys.kappa * sys.kappa;
    const double da = atom.detuning;
    AnalyticMetrics out;
    out.signal = 4.0 * std::sqrt(tau) * a * sys.kappa_T * g2 / (std::abs(da) * k2);
    out.scattered = 4.0 * tau * a * a * sys.kappa_T * g2 * atom.gamma / (da * da * k2);
    out.m10 = 25.0 * k2 * atom.gamma / (sys.kappa_T * g2);
    return out;
}

double strong_coupling_parameter(const CavitySystem &sys, const AtomParams &atom)
{
    return std::norm(sys.g_plus) / (sys.kappa * atom.gamma);
}

} // namespace microdisk
