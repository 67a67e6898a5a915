#pragma once

#include <optional>
#include <string>

namespace microdisk
{

/// Surface roughness: rms height sigma and correlation length L_c, both in metres.
struct SurfaceParams
{
    double sigma = 2e-9;
    double correlation_length = 10e-9;

    void validate() const;
};

/// Power attenuation in dB/km to 1/m.
double attenuation_from_db_per_km(double db_per_km);

/// Q_mat = 2 pi n_c / (alpha lambda).
double q_material(double n_core, double alpha, double wavelength);

/// Q_surf = D lambda^2 / (2 L_c pi^2 sigma^2).
double q_surface(double diameter, double wavelength, const SurfaceParams &surf);

struct LossComponents
{
    double q_wgm = 0.0;
    double q_mat = 0.0;
    double q_surf = 0.0;
    std::optional<double> q_coup; // absent when the disk is uncoupled
    double k_r = 0.0;             // 1/m
    int l = 0;
    double kappa_T = 0.0;         // rad/s
    /// FSR in rad/s for the finesse; c k / l is used when absent.
    std::optional<double> fsr;
};

struct LossBudget
{
    double q_wgm = 0.0, q_mat = 0.0, q_surf = 0.0;
    std::optional<double> q_coup;
    double q_total = 0.0;
    double kappa = 0.0;      // c k / (2 Q_total), rad/s
    double kappa_T = 0.0;    // rad/s
    double kappa_loss = 0.0; // kappa - kappa_T, rad/s
    double finesse = 0.0;    // Q_total FSR / (c k)
};

/// Reciprocal sum of all channels. Throws ConsistencyError if kappa_T exceeds kappa.
LossBudget total_q(const LossComponents &c);

/// JSON object with the named components and derived rates.
std::string to_json(const LossBudget &b);

} // namespace microdisk
