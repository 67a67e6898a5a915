#pragma once

#include "microdisk/coupler.hpp"
#include "microdisk/losses.hpp"
#include "microdisk/wgm.hpp"

namespace microdisk
{

/// Full loss budget of one mode; `coupler` may be null for an uncoupled disk.
LossBudget mode_budget(const WgmMode &mode, const DiskGeometry &disk, const CouplerMatrix *coupler,
                       const SurfaceParams &surface, double loss_db_per_km);

} // namespace microdisk
