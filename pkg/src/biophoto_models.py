"""
Bacterial growth, photo-degradation and photo-degradable memories, turned
into channel transmissivities and fed to the transmitter error formulas.

Time is in abstract units. A degradable sample read at time t is assumed to
have received N t photons in total (N per unit time), which multiplies its
concentration by exp(-gamma N t); the readout itself uses N photons.
"""
import math
from dataclasses import dataclass
from typing import Iterable

from scipy.stats import entropy

from src.errors import DomainError
from src.transmitters import TransmitterConfig, gain, optimal_gain
from src.utils import require_nonnegative, require_positive, require_unit_interval


DEFAULT_EPSILON_L = 1.0


@dataclass(frozen=True)
class GrowthParams:
    c0: float
    g: float
    gamma: float = 0.0
    epsilon_l: float = DEFAULT_EPSILON_L

    def __post_init__(self) -> None:
        require_nonnegative("c0", self.c0)
        require_nonnegative("g", self.g)
        require_nonnegative("gamma", self.gamma)
        require_positive("epsilon_l", self.epsilon_l)


@dataclass(frozen=True)
class SaturationParams:
    """
    Memory cell transmissivity 1 - theta1 exp(-theta2 N).
    """

    theta1: float
    theta2: float

    def __post_init__(self) -> None:
        theta1 = require_unit_interval("theta1", self.theta1)
        if theta1 == 0.0:
            raise DomainError("theta1 must lie in (0, 1]")
        require_positive("theta2", self.theta2)


MEMORY_PANELS = {
    "a": SaturationParams(5e-3, 1e-4),
    "b": SaturationParams(1e-2, 7e-4),
    "c": SaturationParams(5e-2, 7e-3),
    "d": SaturationParams(1e-1, 28e-3),
}


# -------- GROWTH --------

def concentration_growth(t: float, p: GrowthParams) -> float:
    """
    c0 (1 - exp(-g t)).
    """
    t = require_nonnegative("t", t)
    return -p.c0 * math.expm1(-p.g * t)


def concentration_degraded(t: float, total_nbar_per_unit_time: float, p: GrowthParams) -> float:
    """
    Growth damped by photo-degradation: c0 (1 - exp(-g t)) exp(-gamma N t).
    """
    total_nbar_per_unit_time = require_nonnegative("total_nbar_per_unit_time", total_nbar_per_unit_time)
    return concentration_growth(t, p) * math.exp(-p.gamma * total_nbar_per_unit_time * t)


def beer_lambert(c: float, epsilon_l: float = DEFAULT_EPSILON_L) -> float:
    """
    Transmissivity 10^(-epsilon l c) of a sample with concentration c.
    """
    c = require_nonnegative("c", c)
    epsilon_l = require_positive("epsilon_l", epsilon_l)
    return 10.0 ** (-epsilon_l * c)


def transmissivity_at(t: float, total_nbar: float, p: GrowthParams, degraded: bool = False) -> float:
    if degraded:
        c = concentration_degraded(t, total_nbar, p)
    else:
        c = concentration_growth(t, p)
    return beer_lambert(c, p.epsilon_l)


def error_vs_time(
    t_grid: Iterable[float],
    total_nbar: float,
    transmitter: TransmitterConfig,
    p: GrowthParams,
    degraded: bool = False,
) -> list[tuple[float, float]]:
    """
    (t, p_error) along a time grid for one transmitter spending total_nbar
    photons per readout.
    """
    if not isinstance(transmitter, TransmitterConfig):
        raise DomainError(f"expected a TransmitterConfig, got {type(transmitter).__name__}")
    times = [float(t) for t in t_grid]
    if not times:
        raise DomainError("time grid is empty")

    config = transmitter.at_total(total_nbar)
    return [(t, config.error_probability(transmissivity_at(t, total_nbar, p, degraded))) for t in times]


def growth_gains(t: float, total_nbar: float, p: GrowthParams, degraded: bool = False) -> tuple[float, float]:
    """
    (Delta_1, Delta_opt): gain of the single-copy and broadband EPR
    transmitters over coherent light at time t.
    """
    tau = transmissivity_at(t, total_nbar, p, degraded)
    return gain(total_nbar, tau, 1), optimal_gain(total_nbar, tau)


# -------- MEMORY --------

def memory_transmissivity(total_nbar: float, sp: SaturationParams) -> float:
    total_nbar = require_nonnegative("total_nbar", total_nbar)
    return 1.0 - sp.theta1 * math.exp(-sp.theta2 * total_nbar)


def info_per_cell(p_error: float) -> float:
    """
    Bits read per cell, 1 - H2(p).
    """
    p_error = require_unit_interval("p_error", p_error)
    bits = 1.0 - float(entropy([p_error, 1.0 - p_error], base=2))
    return min(max(bits, 0.0), 1.0)


def memory_readout(total_nbar: float, sp: SaturationParams, transmitter: TransmitterConfig) -> float:
    tau = memory_transmissivity(total_nbar, sp)
    return info_per_cell(transmitter.at_total(total_nbar).error_probability(tau))
