#pragma once

#include <numbers>

namespace microdisk
{

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;       // m/s
inline constexpr double kMu0 = 1.25663706212e-6;           // H/m
inline constexpr double kEps0 = 8.8541878128e-12;          // F/m
inline constexpr double kEta0 = 376.730313668;             // ohm

inline constexpr double kMicron = 1e-6;
inline constexpr double kNanometer = 1e-9;

/// Rb D2 line, half width of the coherence decay (population decays at 2*gamma).
inline constexpr double kRubidiumD2Gamma = kPi * 6.07e6;   // rad/s

} // namespace microdisk
