#pragma once

#include "microdisk/atom_params.hpp"

#include <complex>
#include <optional>

namespace microdisk
{

using cplx = std::complex<double>;

/// Cavity + waveguide parameters seen by the atom. Rates in rad/s, pump
/// amplitudes A_in in sqrt(photons/s).
struct CavitySystem
{
    double kappa = 0.0;
    double kappa_T = 0.0;
    double delta_c = 0.0;
    cplx g_plus, g_minus;
    cplx epsilon;
    cplx t11{1.0, 0.0}, t12, t21;
    double round_trip_time = 1.0;
    cplx a_in_plus, a_in_minus;

    /// eta = t21 A_in / sqrt(T_r)
    cplx eta_plus() const;
    cplx eta_minus() const;
    /// |g_+| (equal to |g_-| by construction)
    double g() const { return std::abs(g_plus); }

    void validate() const;
};

/// g_pm = g e^{-+ i l phi_a}.
void set_atom_coupling(CavitySystem &sys, double g, int l, double azimuth);

struct SteadyState
{
    double rho11 = 0.0;
    cplx rho10;
    cplx alpha_plus, alpha_minus;
    cplx a_out_plus, a_out_minus;
    bool bistable = false;
    int root_count = 0;
};

/// Stationary solution of the amplitude and density-matrix equations.
/// Throws PhysicalityError if the population equation has no root in [0, 1/2].
SteadyState steady_state(const CavitySystem &sys, const AtomParams &atom);

/// Time derivative of (alpha_+, alpha_-, rho10, rho11) for the same model, used to
/// verify stationarity.
struct StateDerivative
{
    cplx d_alpha_plus, d_alpha_minus, d_rho10;
    double d_rho11 = 0.0;
};
StateDerivative equations_of_motion(const CavitySystem &sys, const AtomParams &atom, cplx alpha_plus,
                                    cplx alpha_minus, cplx rho10, double rho11);

struct DetectionMetrics
{
    double tau = 0.0;
    // 2 sqrt(tau) |A_out,0| |sin(phi - phi0)|, phases taken from the exact output fields
    double signal = 0.0;
    // full homodyne quadrature 2 sqrt(tau) |A_out| |sin(phi - phi0)|; differs when the atom also changes |A_out|
    double signal_quadrature = 0.0;
    double scattered = 0.0;   // M = 2 Gamma tau rho11
    std::optional<double> m10; // empty when S = 0 (divergent)
    double phi = 0.0, phi0 = 0.0;
    double a_out0_abs = 0.0;
    bool divergent = false;
    bool bistable = false;
    SteadyState with_atom;
    SteadyState without_atom;
};

/// Detection figures for the forward output port; the reference state uses g = 0.
DetectionMetrics detection_metrics(const CavitySystem &sys, const AtomParams &atom, double tau);

struct AnalyticMetrics
{
    double signal = 0.0;
    double scattered = 0.0;
    double m10 = 0.0;
};

/// Far-detuned closed forms in |A_in,+|, kappa, kappa_T, g, Delta_a, Gamma.
AnalyticMetrics analytic_approximations(const CavitySystem &sys, const AtomParams &atom, double tau);

/// g^2 / (kappa Gamma).
double strong_coupling_parameter(const CavitySystem &sys, const AtomParams &atom);

} // namespace microdisk
