#pragma once

// Config-driven experiment runner: flat `section.key = value` text in, CSV tables
// plus a JSON summary out.

#include "microdisk/detection.hpp"
#include "microdisk/fdtd.hpp"
#include "microdisk/losses.hpp"
#include "microdisk/wgm.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace microdisk::experiment
{

enum class Kind
{
    modes,
    fsr,
    q_vs_diameter,
    fdtd_spectrum,
    rabi_profile,
    detect_pump,
    detect_gap,
    detect_epsilon,
    tuning
};

struct CatalogEntry
{
    Kind kind;
    std::string name;
    std::string summary;
    std::string scan; // meaning of scan.*; empty when the experiment has no scan
};

const std::vector<CatalogEntry> &catalog();
std::string kind_name(Kind k);

/// Either an explicit list (scan.values) or start/stop/points with linear or log spacing.
struct ScanRange
{
    std::vector<double> values;
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
    bool log_spacing = false;

    std::vector<double> grid() const;
};

struct Config
{
    Kind kind = Kind::modes;
    int threads = 1;

    DiskGeometry disk;
    SurfaceParams surface;
    double loss_db_per_km = 5.0;

    int l = 0; // 0: nearest mode of order q to `wavelength`
    int q = 1;
    double wavelength = 780e-9;

    double width = 0.6e-6;
    double gap = 0.3e-6;
    double gap2 = 0.6e-6; // second gap column of the mode table

    double atom_gamma = kRubidiumD2Gamma;
    double detuning_over_gamma = 100.0;
    double atom_distance = 50e-9;
    double atom_azimuth = 0.0;

    double tau = 10e-6;
    double pump = 1e8;
    double epsilon_over_kappa_loss = 0.0;
    DeltaCMode delta_c = DeltaCMode::zero;

    std::optional<ScanRange> scan; // falls back to the experiment default

    std::vector<double> mode_diameters;
    std::vector<int> mode_l;
    std::vector<int> mode_q;

    std::vector<double> tuning_indices{1.454, 2.17};
    double fsr_fraction = 1.0;

    fdtd::Scenario fdtd;

    /// Every effective key = value line in a fixed order (thread counts excluded).
    std::string canonical() const;
    /// 16 hex digits of FNV-1a over canonical().
    std::string hash() const;
    ScanRange effective_scan() const;
    DetectionSetup detection_setup() const;
    /// Checks every parameter the chosen experiment touches.
    void validate() const;
};

/// Throws ValidationError naming the key path on unknown keys or bad values.
Config parse_config(const std::string &text);
Config load_config(const std::string &path);

using Cell = std::variant<double, long, std::string>;

struct Table
{
    std::string file; // e.g. "detect_gap.csv"
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// One acceptance check: `value` must fall within [lower, upper].
struct Target
{
    std::string name;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double reference = 0.0;
    bool pass = false;
};

struct Result
{
    std::vector<Table> tables;
    std::vector<Target> targets;
    bool pass() const;
};

/// Runs the experiment. Solver failures are rethrown with the experiment name prepended.
Result run(const Config &config);

/// Writes every table and summary.json into `dir` (created if missing). Returns the file names.
std::vector<std::string> write_outputs(const Config &config, const Result &result, const std::filesystem::path &dir);

/// CSV text of one table, headed by a config-hash comment line.
std::string format_table(const Table &t, const std::string &config_hash);

/// Summary JSON text.
std::string format_summary(const Config &config, const Result &result);

} // namespace microdisk::experiment
