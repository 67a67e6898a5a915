#include "microdisk/budget.hpp"

namespace microdisk
{

LossBudget mode_budget(const WgmMode &mode, const DiskGeometry &disk, const CouplerMatrix *coupler,
                       const SurfaceParams &surface, double loss_db_per_km)
{
    LossComponents c;
    c.q_wgm = mode.q_wgm();
    c.q_mat = q_material(disk.n_core, attenuation_from_db_per_km(loss_db_per_km), mode.wavelength());
    c.q_surf = q_surface(disk.diameter, mode.wavelength(), surface);
    if (coupler)
    {
        c.q_coup = q_coup(*coupler, mode.l);
        c.kappa_T = kappa_T(*coupler);
    }
    c.k_r = mode.k_r();
    c.l = mode.l;
    return total_q(c);
}

} // namespace microdisk
