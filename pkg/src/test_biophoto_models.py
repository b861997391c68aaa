import math

import numpy as np
import pytest

from src.biophoto_models import (
    MEMORY_PANELS,
    GrowthParams,
    SaturationParams,
    beer_lambert,
    concentration_degraded,
    concentration_growth,
    error_vs_time,
    growth_gains,
    info_per_cell,
    memory_readout,
    memory_transmissivity,
)
from src.errors import DomainError
from src.transmitters import BROADBAND, TransmitterConfig, TransmitterKind


COHERENT = TransmitterConfig.with_total(TransmitterKind.COHERENT, 1.0)
EPR_SINGLE = TransmitterConfig.with_total(TransmitterKind.EPR, 1.0, 1)
EPR_BROADBAND = TransmitterConfig.with_total(TransmitterKind.EPR, 1.0, BROADBAND)


# -------- GROWTH --------

def test_concentration_growth():
    p = GrowthParams(c0=1.0, g=0.2)
    assert concentration_growth(0.0, p) == 0.0
    assert concentration_growth(1.0, p) == pytest.approx(0.181269, abs=1e-6)
    assert concentration_growth(1e3, p) == pytest.approx(1.0, abs=1e-12)


def test_concentration_degraded():
    p = GrowthParams(c0=1.0, g=10.0, gamma=1.0)
    assert concentration_degraded(0.0, 100.0, p) == 0.0
    assert concentration_degraded(0.01, 100.0, p) == pytest.approx(0.035008, abs=1e-6)
    assert concentration_degraded(50.0, 100.0, p) == pytest.approx(0.0, abs=1e-12)

    undamped = GrowthParams(c0=1.0, g=10.0)
    assert concentration_degraded(0.3, 100.0, undamped) == concentration_growth(0.3, undamped)


def test_beer_lambert():
    assert beer_lambert(0.0) == 1.0
    assert beer_lambert(1.0) == pytest.approx(0.1)
    assert beer_lambert(0.181269) == pytest.approx(0.658766, abs=1e-6)
    values = [beer_lambert(c) for c in np.linspace(0.0, 3.0, 31)]
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


def test_growth_params_validation():
    with pytest.raises(DomainError):
        GrowthParams(c0=-1.0, g=0.2)
    with pytest.raises(DomainError):
        GrowthParams(c0=1.0, g=0.2, epsilon_l=0.0)


def test_error_vs_time_starts_at_half():
    p = GrowthParams(c0=1.0, g=0.2)
    for transmitter in (COHERENT, EPR_SINGLE, EPR_BROADBAND):
        ((t, p_err),) = error_vs_time([0.0], 500.0, transmitter, p)
        assert t == 0.0
        assert p_err == 0.5


def test_error_vs_time_is_monotone_under_growth():
    p = GrowthParams(c0=1.0, g=0.2)
    for transmitter in (COHERENT, EPR_SINGLE, EPR_BROADBAND):
        errors = [e for _, e in error_vs_time(np.linspace(0.0, 1.0, 21), 50.0, transmitter, p)]
        assert all(later <= earlier for earlier, later in zip(errors, errors[1:]))


def test_error_vs_time_detects_growth_early():
    p = GrowthParams(c0=1.0, g=0.2)
    ((_, broadband),) = error_vs_time([0.05], 500.0, EPR_BROADBAND, p)
    ((_, coherent),) = error_vs_time([0.05], 500.0, COHERENT, p)
    assert broadband < 1e-4
    assert broadband == pytest.approx(5.6e-6, rel=0.05)
    assert coherent >= 0.3
    assert coherent == pytest.approx(0.3747, abs=1e-3)

    curve = error_vs_time(np.linspace(0.0, 1.0, 201), 500.0, COHERENT, p)
    first_below = next(t for t, e in curve if e < 0.01)
    assert 0.3 < first_below <= 0.4


def test_error_vs_time_under_degradation():
    p = GrowthParams(c0=1.0, g=10.0, gamma=1.0)
    ((_, coherent),) = error_vs_time([0.01], 100.0, COHERENT, p, degraded=True)
    ((_, broadband),) = error_vs_time([0.01], 100.0, EPR_BROADBAND, p, degraded=True)
    assert coherent >= 0.30
    assert broadband <= 1e-3

    late = error_vs_time([50.0], 100.0, EPR_BROADBAND, p, degraded=True)
    assert late[0][1] == pytest.approx(0.5, abs=1e-12)


def test_error_vs_time_rejects_bad_input():
    p = GrowthParams(c0=1.0, g=0.2)
    with pytest.raises(DomainError):
        error_vs_time([], 10.0, COHERENT, p)
    with pytest.raises(DomainError):
        error_vs_time([0.1], 10.0, "coherent", p)


def test_growth_gains():
    p = GrowthParams(c0=1.0, g=0.2)
    assert growth_gains(0.0, 100.0, p) == (0.0, 0.0)
    single, best = growth_gains(0.5, 100.0, p)
    assert best >= single > 0.0


# -------- MEMORY --------

def test_memory_transmissivity():
    sp = SaturationParams(0.05, 0.007)
    assert memory_transmissivity(0.0, sp) == pytest.approx(0.95)
    assert memory_transmissivity(100.0, sp) == pytest.approx(0.975171, abs=1e-6)
    assert memory_transmissivity(1e6, sp) == pytest.approx(1.0, abs=1e-12)


def test_saturation_params_validation():
    with pytest.raises(DomainError):
        SaturationParams(0.0, 1e-3)
    with pytest.raises(DomainError):
        SaturationParams(0.1, 0.0)


def test_info_per_cell():
    assert info_per_cell(0.5) == pytest.approx(0.0, abs=1e-12)
    assert info_per_cell(0.0) == 1.0
    assert info_per_cell(0.264841) == pytest.approx(0.16604, abs=2e-4)
    values = [info_per_cell(p) for p in np.linspace(0.01, 0.49, 49)]
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


def test_memory_readout_at_zero_energy():
    for transmitter in (COHERENT, EPR_SINGLE, EPR_BROADBAND):
        assert memory_readout(0.0, MEMORY_PANELS["a"], transmitter) == pytest.approx(0.0, abs=1e-12)


def test_memory_readout_panel_a():
    sp = MEMORY_PANELS["a"]
    assert memory_readout(5000.0, sp, EPR_BROADBAND) >= 0.99
    assert memory_readout(5000.0, sp, COHERENT) <= 0.02


@pytest.mark.parametrize("panel", sorted(MEMORY_PANELS))
def test_memory_readout_ordering(panel):
    sp = MEMORY_PANELS[panel]
    for total in np.logspace(0.0, 5.0, 26):
        broadband = memory_readout(total, sp, EPR_BROADBAND)
        single = memory_readout(total, sp, EPR_SINGLE)
        assert broadband >= single - 1e-12
        assert single >= 0.0
        assert 0.0 <= memory_readout(total, sp, COHERENT) <= 1.0
