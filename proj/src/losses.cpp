#include "microdisk/losses.hpp"

#include "microdisk/constants.hpp"
#include "microdisk/errors.hpp"

#include <json.hpp>

#include <cmath>

namespace microdisk
{

void SurfaceParams::validate() const
{
    if (!(sigma > 0.0))
        throw ValidationError("surface.sigma", "must be positive");
    if (!(correlation_length > 0.0))
        throw ValidationError("surface.correlation_length", "must be positive");
}

double attenuation_from_db_per_km(double db_per_km)
{
    return db_per_km * std::log(10.0) / 10.0 / 1000.0;
}

double q_material(double n_core, double alpha, double wavelength)
{
    if (!(alpha > 0.0))
        throw RangeError("attenuation must be positive");
    return 2.0 * n_core * kPi / (alpha * wavelength);
}

double q_surface(double diameter, double wavelength, const SurfaceParams &surf)
{
    surf.validate();
    return diameter * wavelength * wavelength /
           (2.0 * surf.correlation_length * kPi * kPi * surf.sigma * surf.sigma);
}

LossBudget total_q(const LossComponents &c)
{
    if (!(c.q_wgm > 0.0) || !(c.q_mat > 0.0) || !(c.q_surf > 0.0) || (c.q_coup && !(*c.q_coup > 0.0)))
        throw RangeError("quality factors must be positive");
    if (!(c.k_r > 0.0))
        throw RangeError("k_r must be positive");

    LossBudget b;
    b.q_wgm = c.q_wgm;
    b.q_mat = c.q_mat;
    b.q_surf = c.q_surf;
    b.q_coup = c.q_coup;
    double inv = 1.0 / c.q_wgm + 1.0 / c.q_mat + 1.0 / c.q_surf;
    if (c.q_coup)
        inv += 1.0 / *c.q_coup;
    b.q_total = 1.0 / inv;

    const double ck = kSpeedOfLight * c.k_r;
    b.kappa = ck / (2.0 * b.q_total);
    b.kappa_T = c.kappa_T;
    b.kappa_loss = b.kappa - b.kappa_T;
    if (b.kappa_loss < -1e-9 * b.kappa)
        throw ConsistencyError("coupling rate exceeds the total decay rate");
    b.kappa_loss = std::max(b.kappa_loss, 0.0);
    const double fsr = c.fsr ? *c.fsr : (c.l > 0 ? ck / c.l : 0.0);
    b.finesse = b.q_total * fsr / ck;
    return b;
}

std::string to_json(const LossBudget &b)
{
    nlohmann::ordered_json j;
    j["Q_wgm"] = b.q_wgm;
    j["Q_mat"] = b.q_mat;
    j["Q_surf"] = b.q_surf;
    j["Q_coup"] = b.q_coup ? nlohmann::ordered_json(*b.q_coup) : nlohmann::ordered_json(nullptr);
    j["Q_total"] = b.q_total;
    j["kappa_rad_s"] = b.kappa;
    j["kappa_T_rad_s"] = b.kappa_T;
    j["kappa_loss_rad_s"] = b.kappa_loss;
    j["finesse"] = b.finesse;
    return j.dump(2);
}

} // namespace microdisk
