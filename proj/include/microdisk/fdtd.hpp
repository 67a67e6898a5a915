#pragma once

// 2D TE (E_y out of plane) Yee solver for a disk next to a straight waveguide.
// The waveguide runs along z at x = R + gap + w/2; the disk is centred at the origin.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace microdisk::fdtd
{

using cplx = std::complex<double>;

enum class SourceKind
{
    pulse,
    cw
};

struct Scenario
{
    // geometry
    double disk_diameter = 5e-6; // 0: no disk (reference run)
    double n_core = 1.454;
    double n_clad = 1.0;
    double waveguide_width = 0.6e-6;
    double gap = 0.2e-6;
    bool include_disk = true;
    bool include_waveguide = true; // false: uniform line source in vacuum
    bool periodic_x = false;       // wrap x instead of absorbing (plane-wave tests)

    // grid
    double cell = 0.04e-6;
    double time_step = 0.0; // 0: min(0.99 Courant, upper bound)
    int pml_cells = 16;
    double pml_reflection = 1e-8;
    int pml_order = 3;
    double padding = 1.0e-6; // structure to absorber
    double lead = 1.0e-6;    // extra waveguide length before source / after output plane
    int averaging_samples = 8;

    // source
    SourceKind source = SourceKind::pulse;
    double center_wavelength = 780e-9;
    double pulse_duration = 30e-15; // intensity FWHM
    double cw_ramp = 100e-15;
    bool reverse = false; // inject from the +z end

    // spectrum
    double lambda_min = 740e-9;
    double lambda_max = 830e-9;
    int n_freq = 600;
    int dft_stride = 4;
    double flux_margin = 0.6e-6;

    // run length
    long steps = 0;            // 0: from total_time
    double total_time = 4e-12; // seconds
    int record_stride = 10;
    int threads = 1;

    double radius() const { return 0.5 * disk_diameter; }
    double resolved_time_step() const;
    long resolved_steps() const;
    void validate() const;
};

Scenario parse_scenario(const std::string &text);
Scenario load_scenario(const std::string &path);
std::string format_scenario(const Scenario &s);

/// Running DFT of E_y and H_x along one z = const plane.
struct FluxPlane
{
    double z = 0.0;
    int k = 0;
    std::vector<cplx> e; // [f * nx + i]
    std::vector<cplx> h;

    std::vector<double> power(const std::vector<double> &freqs, double dx, int nx, double sign) const;
};

struct FieldRecord
{
    std::vector<double> frequencies; // Hz, ascending
    std::vector<double> input_power;  // downstream of the source
    std::vector<double> output_power; // at the far end of the guide
    std::vector<double> probe_ey;     // E_y at the output guide centre, every record_stride steps
    std::vector<double> probe_hx;
    std::vector<double> energy;       // interior field energy per unit length, every record_stride steps
    int record_stride = 1;
    long steps = 0;
    double time_step = 0.0;
    double duration = 0.0;
    int nx = 0, nz = 0;
    double cell = 0.0;
};

class Simulation
{
public:
    explicit Simulation(const Scenario &s);
    ~Simulation();
    Simulation(const Simulation &) = delete;
    Simulation &operator=(const Simulation &) = delete;

    void advance(long n);
    long step_index() const { return step_; }
    const Scenario &scenario() const { return sc_; }
    int nx() const { return nx_; }
    int nz() const { return nz_; }
    double x_at(int i) const { return x0_ + i * dx_; }
    double z_at(int k) const { return z0_ + k * dx_; }
    double ey(int i, int k) const { return ey_[idx(i, k)]; }
    double eps_r(int i, int k) const { return eps_[idx(i, k)]; }
    double interior_energy() const;

    /// Flat float64 E_y dump (row-major, z slowest) plus a JSON header next to it.
    void write_snapshot(const std::string &path_prefix) const;

    FieldRecord record() const;

private:
    std::size_t idx(int i, int k) const { return static_cast<std::size_t>(k) * nx_ + i; }
    void build_grid();
    void build_pml();
    void build_source();
    void update_h(int k_begin, int k_end);
    void update_e(int k_begin, int k_end);
    void accumulate_dft();
    double source_amplitude(double t) const;
    void check_finite() const;

    Scenario sc_;
    double dx_ = 0.0, dt_ = 0.0, x0_ = 0.0, z0_ = 0.0;
    int nx_ = 0, nz_ = 0;
    long step_ = 0;
    std::vector<double> ey_, hx_, hz_, eps_, ce_;
    // absorber profiles along x and z at integer (e) and half-integer (h) positions
    std::vector<double> bx_e_, ax_e_, bx_h_, ax_h_, bz_e_, az_e_, bz_h_, az_h_;
    std::vector<double> psi_ey_x_, psi_ey_z_, psi_hz_x_, psi_hx_z_;
    int k_source_ = 0;
    std::vector<double> source_profile_;
    double omega0_ = 0.0, t0_ = 0.0, env_a_ = 0.0;
    int flux_i0_ = 0, flux_i1_ = 0;
    FluxPlane in_plane_, out_plane_;
    std::vector<double> freqs_;
    std::vector<double> probe_ey_, probe_hx_, energy_;
    int probe_i_ = 0, probe_k_ = 0;

    struct Pool;
    Pool *pool_ = nullptr;
};

/// Runs a scenario to completion.
FieldRecord run(const Scenario &s);

struct Spectrum
{
    std::vector<double> frequencies;
    std::vector<double> transmission;
    double duration = 0.0; // simulated time behind the spectrum; 0 if unknown
};

/// Output flux normalised by the same plane in a disk-free reference run.
Spectrum transmission_spectrum(const FieldRecord &run, const FieldRecord *reference);

/// Disk run plus matching reference run.
Spectrum simulate_transmission(const Scenario &s);

struct Resonance
{
    double frequency = 0.0;
    double wavelength = 0.0;
    double q_loaded = 0.0;
    double depth = 0.0; // 1 - T at the centre of the fitted dip
    bool lower_bound = false;
};

struct ResonanceOptions
{
    double min_depth = 0.02;
    int min_samples_per_linewidth = 8;
};

std::vector<Resonance> extract_resonances(const Spectrum &spectrum, const ResonanceOptions &opts = {});

void write_spectrum_csv(const Spectrum &s, const std::string &path);

} // namespace microdisk::fdtd
