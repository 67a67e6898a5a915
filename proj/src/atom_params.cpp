#include "microdisk/atom_params.hpp"

#include "microdisk/errors.hpp"

#include <cmath>

namespace microdisk
{

void AtomParams::validate() const
{
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw ValidationError("atom.gamma", "must be positive");
    if (!std::isfinite(detuning))
        throw ValidationError("atom.detuning", "must be finite");
    if (!(radius >= 0.0))
        throw ValidationError("atom.radius", "must be non-negative");
}

} // namespace microdisk
