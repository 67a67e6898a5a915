"""Microdisk resonator models. Lengths in metres, rates in rad/s."""

from ._core import (
    DiskGeometry,
    Error,
    ExperimentError,
    ValidationError,
    WgmMode,
    attenuation_from_db_per_km,
    config_hash,
    experiments,
    find_resonance_near,
    free_spectral_range,
    frequency_shift,
    fsr_scan_requirement,
    q_material,
    q_surface,
    rabi_frequency,
    run_experiment,
    solve_mode,
)

__all__ = [
    "DiskGeometry",
    "Error",
    "ExperimentError",
    "ValidationError",
    "WgmMode",
    "attenuation_from_db_per_km",
    "config_hash",
    "experiments",
    "find_resonance_near",
    "free_spectral_range",
    "frequency_shift",
    "fsr_scan_requirement",
    "q_material",
    "q_surface",
    "rabi_frequency",
    "run_experiment",
    "solve_mode",
]
