#pragma once

#include "microdisk/atom_params.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace microdisk
{

using cplx = std::complex<double>;

struct DiskGeometry
{
    double diameter = 30e-6; // m
    double height = 5e-6;    // slice thickness d_y, m
    double n_core = 1.454;
    double n_clad = 1.0;

    double radius() const { return 0.5 * diameter; }
    void validate() const;
};

enum class Direction
{
    forward,
    backward
};

/// One whispering-gallery eigenmode. The wavenumber is k = k_r - i k_i with k_i > 0.
struct WgmMode
{
    int l = 0;
    int q = 1;
    cplx k;
    Direction direction = Direction::forward;
    int iterations = 0;

    double k_r() const { return k.real(); }
    double k_i() const { return -k.imag(); }
    double wavelength() const;
    double q_wgm() const { return k_r() / (2.0 * k_i()); }
    /// Angular frequency c * k_r.
    double omega() const;
};

/// n_c J_{l+1}(k n_c R)/J_l(k n_c R) - n_cl H_{l+1}(k n_cl R)/H_l(k n_cl R).
/// Throws PoleError where either denominator vanishes.
cplx dispersion_residual(cplx k, int l, const DiskGeometry &geom);

/// Leading uniform-asymptotic estimate of k R for the (l, q) mode.
double asymptotic_size_parameter(int l, int q, const DiskGeometry &geom);

inline constexpr double kResidualTolerance = 1e-11;

/// Solves for the (l, q) eigenmode. Throws ConvergenceError, or RetargetingError
/// when every seed converges to a different radial order.
WgmMode solve_mode(int l, int q, const DiskGeometry &geom, double lambda_seed);

/// Number of interior maxima of |J_l(k_r n_c r)| on 0 < r < R.
int count_radial_extrema(int l, double k_r, const DiskGeometry &geom);

/// Radial field normalized to 1 at r = R.
cplx mode_field(const WgmMode &mode, const DiskGeometry &geom, double r);

struct NormalizationIntegral
{
    double value = 0.0;       // int_0^inf r n^2 |E|^2 dr, m^2
    double tail_bound = 0.0;  // analytic bound on the truncated outer tail
    double outer_radius = 0.0;
};

/// Radial normalization integral. Throws AccuracyError if panel doubling does not
/// settle to 1e-6 relative.
NormalizationIntegral normalization_integral(const WgmMode &mode, const DiskGeometry &geom);

/// Single-photon Rabi frequency g (rad/s) for an atom at radius atom_r >= R.
double rabi_frequency(const WgmMode &mode, const DiskGeometry &geom, double atom_r, const AtomParams &atom);

/// Same, reusing a precomputed normalization integral.
double rabi_frequency(const WgmMode &mode, const DiskGeometry &geom, double atom_r, const AtomParams &atom,
                      const NormalizationIntegral &norm);

struct FreeSpectralRange
{
    double approx_omega = 0.0;  // c k_r / l, rad/s
    double approx_lambda = 0.0; // lambda / l, m
    std::optional<double> adjacent_omega;  // c (k_l - k_{l-1}), rad/s
    std::optional<double> adjacent_lambda; // lambda_{l-1} - lambda_l, m
    bool adjacent_found = false;
};

FreeSpectralRange free_spectral_range(const WgmMode &mode, const DiskGeometry &geom);

/// Mode of radial order q whose wavelength is nearest lambda_target.
WgmMode find_resonance_near(double lambda_target, const DiskGeometry &geom, int q);

} // namespace microdisk
