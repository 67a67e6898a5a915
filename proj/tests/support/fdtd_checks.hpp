#pragma once

// Absorber reflection measured against a reference run on a much longer domain.
// The probe sits at the output plane; the reference absorber is far enough away that
// its own echo never reaches the probe inside the recording window.

#include "microdisk/constants.hpp"
#include "microdisk/fdtd.hpp"

#include <algorithm>
#include <cmath>

namespace oracle
{

struct ReflectionResult
{
    double reflected_energy = 0.0;
    double incident_energy = 0.0;
    double ratio() const { return reflected_energy / incident_energy; }
};

inline microdisk::fdtd::Scenario plane_pulse_scenario(double cell)
{
    microdisk::fdtd::Scenario s;
    s.include_disk = false;
    s.include_waveguide = false;
    s.periodic_x = true;
    s.disk_diameter = 0.0;
    s.gap = 0.1e-6;
    s.waveguide_width = 0.2e-6;
    s.cell = cell;
    s.padding = 1.0e-6;
    s.lead = 1.0e-6;
    s.record_stride = 1;
    s.n_freq = 2;
    return s;
}

inline ReflectionResult absorber_reflection(double cell)
{
    using namespace microdisk;
    fdtd::Scenario a = plane_pulse_scenario(cell);
    const double dt = a.resolved_time_step();
    // pulse centre passes the probe at t0 + 2 padding / c; keep recording until its
    // tail (t0 past the centre) has made the round trip to the absorber and back
    const double t0 = 4.5 * a.pulse_duration / std::sqrt(2.0 * std::log(2.0));
    const double window = 2.0 * t0 + (2.0 * a.padding + 2.0 * a.lead + 4.0 * a.pml_cells * cell) / kSpeedOfLight;
    a.steps = static_cast<long>(std::ceil(window / dt));
    fdtd::Scenario b = a;
    // the reference echo needs a round trip over the extra lead
    b.lead = a.lead + 0.5 * kSpeedOfLight * window + 1e-6;
    const fdtd::FieldRecord ra = fdtd::run(a);
    const fdtd::FieldRecord rb = fdtd::run(b);
    ReflectionResult out;
    const std::size_t n = std::min(ra.probe_ey.size(), rb.probe_ey.size());
    for (std::size_t i = 0; i < n; ++i)
    {
        const double d = ra.probe_ey[i] - rb.probe_ey[i];
        out.reflected_energy += d * d;
        out.incident_energy += rb.probe_ey[i] * rb.probe_ey[i];
    }
    return out;
}

} // namespace oracle
