#pragma once

#include "microdisk/wgm.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace microdisk
{

/// Fundamental even TE mode of a symmetric slab waveguide.
struct SlabMode
{
    double width = 0.0;  // m
    double k = 0.0;      // vacuum wavenumber, 1/m
    double beta = 0.0;   // propagation constant, 1/m
    double kappa = 0.0;  // transverse wavenumber in the core, 1/m
    double gamma = 0.0;  // decay constant in the cladding, 1/m
    double n_eff = 0.0;

    /// Unit-peak transverse profile, s measured from the waveguide centre.
    double profile(double s) const;
    /// int profile^2 ds over the real line.
    double power_norm() const;
};

/// Throws MultimodeError if a second even mode is guided, NoModeError if none is.
SlabMode solve_slab_mode(double width, double n_core, double n_clad, double wavelength);

struct CouplerGeometry
{
    double gap = 0.3e-6;   // closest wall-to-rim distance, m
    double width = 0.6e-6; // waveguide width, m
    DiskGeometry disk;

    void validate() const;
};

/// Transmission matrix of the waveguide-disk coupler in the canonical gauge
/// (t11, t22 real and non-negative; t12 = t21 = i|t12|).
struct CouplerMatrix
{
    cplx t11, t12, t21, t22;
    double round_trip_time = 0.0; // 2 pi l / (c k_r), s
    int l = 0;
    double k_r = 0.0;
    // raw integration diagnostics
    double t12_abs_raw = 0.0;     // |a_wgm| for unit waveguide input
    double t21_abs_raw = 0.0;     // |a_wg| for unit WGM input
    double power_drift = 0.0;     // max | |a1|^2 + |a2|^2 - 1 | over both columns
    double z_max = 0.0;
    double edge_ratio = 0.0;      // C(z_max)/C(0)

    double t12_abs2() const { return std::norm(t12); }
};

/// kappa_T = |t12|^2 / (2 T_r); zero for an uncoupled disk.
double kappa_T(const CouplerMatrix &t);

/// Q_coup = 2 pi l / |t12|^2; empty when t12 = 0 (no coupling channel).
std::optional<double> q_coup(const CouplerMatrix &t, int l);

struct CouplerOptions
{
    /// Use beta_wgm = beta_lin along the whole window.
    bool phase_matched = false;
    double rtol = 1e-10;
    double atol = 1e-12;
    /// C(z_max)/C(0) the window is extended to reach.
    double edge_threshold = 1e-5;
};

/// Per-mode coupler model. Tabulates the WGM radial profile once and evaluates the
/// overlap coefficient and transmission matrix for any gap at fixed width.
class CouplerModel
{
public:
    CouplerModel(const WgmMode &mode, const DiskGeometry &disk, double width);
    CouplerModel(const WgmMode &mode, const DiskGeometry &disk, const SlabMode &slab);

    const SlabMode &slab() const { return slab_; }
    const WgmMode &mode() const { return mode_; }
    const DiskGeometry &disk() const { return disk_; }
    double width() const { return width_; }

    /// Real part of the WGM radial field normalized to 1 at the rim (tabulated).
    double wgm_profile(double r) const;

    /// Overlap coupling coefficient C(z), 1/m, at local gap gap + z^2/D.
    double coupling_coefficient(double z, double gap) const;

    /// Window half-length used for a given gap.
    double coupling_window(double gap, const CouplerOptions &options = {}) const;

    CouplerMatrix transmission(double gap, const CouplerOptions &options = {}) const;

private:
    WgmMode mode_;
    DiskGeometry disk_;
    double width_;
    SlabMode slab_;
    double r_lo_, r_hi_, dr_;
    std::vector<double> table_;
    double wgm_norm_ = 0.0;
    double slab_norm_ = 0.0;
};

/// Convenience forms building a CouplerModel for a single evaluation.
double coupling_coefficient(double z, const SlabMode &slab, const WgmMode &mode, const CouplerGeometry &geom);
CouplerMatrix transmission_matrix(const SlabMode &slab, const WgmMode &mode, const CouplerGeometry &geom,
                                  const CouplerOptions &options = {});

} // namespace microdisk
