import math

import pytest

import microdisk as md


def test_mode_near_780():
    disk = md.DiskGeometry(diameter=30e-6)
    mode = md.solve_mode(167, 1, disk)
    assert mode.l == 167
    assert abs(mode.wavelength * 1e9 - 778.73) < 0.15
    assert mode.q_wgm > 1e10


def test_fsr_and_rabi():
    disk = md.DiskGeometry(diameter=30e-6)
    mode = md.find_resonance_near(780e-9, disk)
    assert abs(md.free_spectral_range(mode, disk) * 1e9 - 4.54) < 0.1
    g = md.rabi_frequency(mode, disk)
    assert 90e6 < g / (2 * math.pi) < 115e6
    assert md.rabi_frequency(mode, disk, 100e-9) < g


def test_loss_formulas():
    alpha = md.attenuation_from_db_per_km(5.0)
    assert md.q_material(1.454, alpha, 780e-9) == pytest.approx(1e10, rel=0.05)
    assert md.q_surface(30e-6, 780e-9) == pytest.approx(2.3116e7, rel=1e-4)


def test_tuning():
    assert md.frequency_shift(1e-5, 2e-5) == -1e-5 - 2e-5
    req = md.fsr_scan_requirement(md.DiskGeometry(diameter=15e-6))
    assert req["dn_over_n"] == pytest.approx(1.0 / req["l"])


def test_validation_error_carries_key():
    with pytest.raises(md.ValidationError, match="geometry.diameter"):
        md.DiskGeometry(diameter=-1.0)


def test_run_experiment(tmp_path):
    text = "experiment = fsr\n"
    assert "fsr" in md.experiments()
    result = md.run_experiment(text, str(tmp_path))
    assert result["experiment"] == "fsr"
    assert result["config_hash"] == md.config_hash(text)
    assert result["pass"]
    table = result["tables"]["fsr.csv"]
    assert len(next(iter(table.values()))) == 3
    assert (tmp_path / "summary.json").exists()


def test_bad_config():
    with pytest.raises(md.ValidationError):
        md.run_experiment("experiment = nope\n")
