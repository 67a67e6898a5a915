#pragma once

#include "microdisk/atom_cavity.hpp"
#include "microdisk/coupler.hpp"
#include "microdisk/losses.hpp"
#include "microdisk/wgm.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace microdisk
{

enum class DeltaCMode
{
    zero,      // Delta_c = 0
    plus_eps,  // Delta_c = +|epsilon|
    minus_eps  // Delta_c = -|epsilon|
};

/// Everything needed to assemble a CavitySystem for one disk mode.
struct DetectionSetup
{
    DiskGeometry disk;
    int l = 0; // 0: nearest q-mode to target_wavelength
    int q = 1;
    double target_wavelength = 780e-9;
    double width = 0.6e-6;
    double gap = 0.3e-6;
    SurfaceParams surface;
    double loss_db_per_km = 5.0;
    AtomParams atom{kRubidiumD2Gamma, 100.0 * kRubidiumD2Gamma, 0.0, 0.0};
    double atom_distance = 50e-9; // from the rim
    double tau = 10e-6;
    double pump = 1e8;            // |A_in,+|^2, photons/s
    double epsilon_over_kappa_loss = 0.0;
    DeltaCMode delta_c = DeltaCMode::zero;

    void validate() const;
};

struct ScanRow
{
    double var = 0.0;
    double signal = 0.0;
    double signal_quadrature = 0.0;
    double scattered = 0.0;
    std::optional<double> m10;
    double rho11 = 0.0;
    double q_total = 0.0;
    double kappa = 0.0;
    double kappa_T = 0.0;
    double kappa_loss = 0.0;
    double strong_coupling = 0.0;
    std::vector<std::string> flags;

    bool has_flag(const std::string &f) const;
};

/// Caches the mode, coupler model, g(r_a) and the gap-independent losses.
class DetectionModel
{
public:
    explicit DetectionModel(const DetectionSetup &setup);

    const DetectionSetup &setup() const { return setup_; }
    const WgmMode &mode() const { return mode_; }
    const CouplerModel &coupler() const { return *coupler_; }
    double g() const { return g_; }

    struct Point
    {
        CavitySystem system;
        AtomParams atom;
        LossBudget budget;
        CouplerMatrix coupler;
    };

    Point assemble(double gap, double pump, double epsilon_over_kappa_loss, DeltaCMode delta_c) const;
    ScanRow evaluate(double var, const Point &p) const;

    /// Empty-cavity output A_out,0 / A_in on the forward port.
    cplx reference_output(double gap, double epsilon_over_kappa_loss, DeltaCMode delta_c) const;

private:
    DetectionSetup setup_;
    WgmMode mode_;
    std::shared_ptr<CouplerModel> coupler_;
    double g_ = 0.0;
    double q_wgm_ = 0.0, q_mat_ = 0.0, q_surf_ = 0.0;
};

std::vector<ScanRow> scan_pump(const DetectionModel &model, const std::vector<double> &pumps, int threads = 1);

/// Marks the minimum-M10 row "optimum" and inserts a "critical" row where the
/// empty-cavity output changes sign.
std::vector<ScanRow> scan_gap(const DetectionModel &model, const std::vector<double> &gaps, int threads = 1);

std::vector<ScanRow> scan_epsilon(const DetectionModel &model, const std::vector<double> &ratios, DeltaCMode delta_c,
                                  int threads = 1);

} // namespace microdisk
