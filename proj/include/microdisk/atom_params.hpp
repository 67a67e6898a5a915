#pragma once

#include "microdisk/constants.hpp"

namespace microdisk
{

/// Two-level atom near the disk. gamma is the coherence decay rate (HWHM);
/// the excited-state population decays at 2 * gamma.
struct AtomParams
{
    double gamma = kRubidiumD2Gamma; // rad/s
    double detuning = 0.0;           // Delta_a, rad/s
    double radius = 0.0;             // r_a, m
    double azimuth = 0.0;            // phi_a, rad

    void validate() const;
};

} // namespace microdisk
