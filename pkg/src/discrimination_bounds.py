"""
Symmetric and asymmetric bounds for discriminating two Gaussian states.

The central quantity is the s-overlap C_s = Tr(rho0^s rho1^(1-s)), computed in
closed form from the first two moments of the states. From it:

    fidelity bound  (1 - sqrt(1 - F^M)) / 2  <=  Helstrom
    Helstrom        <=  QCB = C^M / 2,   C = inf_s C_s
    QCB             <=  QBB = C_{1/2}^M / 2
    Hoeffding       H(r) = sup_{0 <= s < 1} (-r s - ln C_s) / (1 - s)

All logarithms are natural.
"""
import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from functools import cached_property
from typing import Optional

import numpy as np

from src.errors import DomainError, NumericError
from src.gaussian_core import GaussianState, williamson
from src.optimize import S_EDGE, S_GRID_POINTS, S_TOLERANCE, grid_golden_minimize
from src.utils import (
    require_copies,
    require_nonnegative,
    require_open_unit_interval,
    require_unit_interval,
)


logger = logging.getLogger(__name__)

# s -> 0 stand-in when state0 is mixed and the limit has no closed form
S_ZERO_PROXY = 1e-6
DIVERGENCE_CAP = 1e4
DIVERGENCE_FLOOR = 50.0
PURITY_SNAP = 1e-9
SHORTCUT_TOL = 1e-6
BOUNDARY_TOL = 1e-12
IDENTICAL_TOL = 1e-14
LOG_OVERLAP_NOISE = 1e-12


# -------- TYPES --------

class Classification(str, Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class HoeffdingResult:
    r: float
    h_value: float
    s_star: Optional[float]
    classification: Classification

    @property
    def is_infinite(self) -> bool:
        return self.classification is Classification.INFINITE

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "h_value": "inf" if math.isinf(self.h_value) else self.h_value,
            "s_star": self.s_star,
            "classification": self.classification.value,
        }


def _infinite(r: float) -> HoeffdingResult:
    return HoeffdingResult(r=r, h_value=math.inf, s_star=None, classification=Classification.INFINITE)


@dataclass(frozen=True)
class BoundSet:
    m_copies: int
    fidelity_lower: float
    qcb: float
    qbb: float
    helstrom_exact: Optional[float] = None

    def is_ordered(self, slack: float = 1e-12) -> bool:
        chain = [self.fidelity_lower]
        if self.helstrom_exact is not None:
            chain.append(self.helstrom_exact)
        chain += [self.qcb, self.qbb]
        return all(lo <= hi + slack for lo, hi in zip(chain, chain[1:]))

    def to_dict(self) -> dict:
        return asdict(self)


# -------- G AND LAMBDA --------
# With L = ln((x-1)/(x+1)) both functions are written through expm1(s L),
# which stays accurate near s = 0 and gives the x = 1 limit exactly.

def _log_g(x: np.ndarray, s: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    mixed = x > 1.0
    if mixed.any():
        xm = x[mixed]
        log_ratio = np.log((xm - 1.0) / (xm + 1.0))
        out[mixed] = s * np.log(2.0 / (xm + 1.0)) - np.log(-np.expm1(s * log_ratio))
    return out


def _lambda(x: np.ndarray, s: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    mixed = x > 1.0
    if mixed.any():
        xm = x[mixed]
        s_log_ratio = s * np.log((xm - 1.0) / (xm + 1.0))
        out[mixed] = (1.0 + np.exp(s_log_ratio)) / (-np.expm1(s_log_ratio))
    return out


def _check_g_args(x: float, s: float) -> tuple[float, float]:
    x = require_nonnegative("x", x)
    if x < 1.0:
        raise DomainError(f"x must be >= 1, got {x}")
    s = require_unit_interval("s", s)
    if s == 0.0:
        raise DomainError("s must lie in (0, 1]")
    return x, s


def g_function(x: float, s: float) -> float:
    """
    G_s(x) = 2^s / ((x+1)^s - (x-1)^s), with G_s(1) = 1.
    """
    x, s = _check_g_args(x, s)
    return float(np.exp(_log_g(np.array([x]), s)[0]))


def lambda_function(x: float, s: float) -> float:
    """
    Lambda_s(x) = ((x+1)^s + (x-1)^s) / ((x+1)^s - (x-1)^s), with Lambda_s(1) = 1.
    """
    x, s = _check_g_args(x, s)
    return float(_lambda(np.array([x]), s)[0])


# -------- FIDELITY AND OVERLAP --------

def _require_same_modes(state0: GaussianState, state1: GaussianState) -> None:
    if state0.n_modes != state1.n_modes:
        raise DomainError(f"states have {state0.n_modes} and {state1.n_modes} modes")


def gaussian_fidelity_pure_mixed(pure: GaussianState, mixed: GaussianState) -> float:
    """
    F = <phi|rho|phi> = 2^n / sqrt(det(V0 + V1)) * exp(-d^T (V0 + V1)^-1 d / 2).
    """
    _require_same_modes(pure, mixed)
    if not pure.is_pure():
        raise DomainError("first argument of the pure/mixed fidelity must be a pure state")

    total = pure.cm + mixed.cm
    d = pure.mean - mixed.mean
    det = np.linalg.det(total)
    if not np.isfinite(det) or det <= 0.0:
        raise NumericError(f"V0 + V1 is singular (det = {det})")
    try:
        quad = float(d @ np.linalg.solve(total, d))
    except np.linalg.LinAlgError as e:
        raise NumericError(f"V0 + V1 is singular: {e}") from e

    fidelity = 2.0 ** pure.n_modes / math.sqrt(det) * math.exp(-0.5 * quad)
    return min(fidelity, 1.0)


def _snap_pure(nu: np.ndarray) -> np.ndarray:
    return np.where(np.abs(nu - 1.0) < PURITY_SNAP, 1.0, nu)


class _OverlapKernel:
    """
    s -> C_s for one fixed pair of states; decompositions are done once.
    """

    def __init__(self, state0: GaussianState, state1: GaussianState):
        _require_same_modes(state0, state1)
        self.state0 = state0
        self.state1 = state1
        self.n_modes = state0.n_modes
        self.state0_pure = state0.is_pure()
        self.both_pure = self.state0_pure and state1.is_pure()
        self.identical = np.allclose(state0.cm, state1.cm, rtol=0.0, atol=IDENTICAL_TOL) and np.allclose(
            state0.mean, state1.mean, rtol=0.0, atol=IDENTICAL_TOL
        )

        if not self.both_pure:
            dec0 = williamson(state0)
            dec1 = williamson(state1)
            self.nu0 = _snap_pure(dec0.mode_eigenvalues)
            self.nu1 = _snap_pure(dec1.mode_eigenvalues)
            self.s0 = dec0.s_matrix
            self.s1 = dec1.s_matrix
            self.d = state0.mean - state1.mean

    @cached_property
    def fidelity(self) -> float:
        return gaussian_fidelity_pure_mixed(self.state0, self.state1)

    def log_overlap(self, s: float) -> float:
        if self.identical:
            return 0.0
        if self.both_pure:
            # C_s of two pure states is their fidelity for every s
            return math.log(self.fidelity)

        log_pi = self.n_modes * math.log(2.0) + float(np.sum(_log_g(self.nu0, s)) + np.sum(_log_g(self.nu1, 1.0 - s)))
        sigma = (
            self.s0 @ np.diag(np.repeat(_lambda(self.nu0, s), 2)) @ self.s0.T
            + self.s1 @ np.diag(np.repeat(_lambda(self.nu1, 1.0 - s), 2)) @ self.s1.T
        )
        sign, logdet = np.linalg.slogdet(sigma)
        if sign <= 0 or not np.isfinite(logdet):
            raise NumericError(f"Sigma_s is not positive definite at s = {s}")
        quad = float(self.d @ np.linalg.solve(sigma, self.d))

        value = log_pi - 0.5 * logdet - 0.5 * quad
        if not math.isfinite(value):
            raise NumericError(f"non-finite s-overlap at s = {s}")
        # round-off can push ln C_s just below 0 for near-identical pairs
        return 0.0 if value > -LOG_OVERLAP_NOISE else value

    def __call__(self, s: float) -> float:
        return math.exp(self.log_overlap(s))

    def limit_at_zero(self) -> float:
        if self.state0_pure:
            return self.fidelity
        return self(S_ZERO_PROXY)


def s_overlap(state0: GaussianState, state1: GaussianState, s: float) -> float:
    s = require_open_unit_interval("s", s)
    return _OverlapKernel(state0, state1)(s)


def chernoff_overlap(
    state0: GaussianState,
    state1: GaussianState,
    n_grid: int = S_GRID_POINTS,
) -> tuple[float, float]:
    """
    Numerical inf over s in (0, 1) of C_s.

    Returns (C, s_star); s_star = 0 means the infimum is the s -> 0 limit.
    """
    kernel = _OverlapKernel(state0, state1)
    result = grid_golden_minimize(kernel, n_grid=n_grid, edge=S_EDGE, tol=S_TOLERANCE)

    at_zero = kernel.limit_at_zero()
    if at_zero <= result.minimum:
        return at_zero, 0.0
    return result.minimum, result.argmin


# -------- SYMMETRIC BOUNDS --------

def qcb(state0: GaussianState, state1: GaussianState, m_copies: int, n_grid: int = S_GRID_POINTS) -> float:
    """
    Quantum Chernoff bound (1/2) C^M.

    For a pure state0 the infimum is the fidelity; the numerical search still
    runs and a disagreement above 1e-6 is logged.
    """
    m_copies = require_copies(m_copies)
    numeric, s_star = chernoff_overlap(state0, state1, n_grid=n_grid)

    if state0.is_pure():
        overlap = gaussian_fidelity_pure_mixed(state0, state1)
        if abs(numeric - overlap) > SHORTCUT_TOL:
            logger.warning("QCB shortcut F=%.9g differs from numerical infimum %.9g (s*=%.3g)", overlap, numeric, s_star)
    else:
        overlap = numeric

    return 0.5 * overlap ** m_copies


def qbb(state0: GaussianState, state1: GaussianState, m_copies: int) -> float:
    m_copies = require_copies(m_copies)
    return 0.5 * s_overlap(state0, state1, 0.5) ** m_copies


def _require_fidelity(fidelity: float, allow_zero: bool) -> float:
    fidelity = require_unit_interval("fidelity", fidelity)
    if fidelity == 0.0 and not allow_zero:
        raise DomainError("fidelity must lie in (0, 1]")
    return fidelity


def fidelity_lower_bound(fidelity: float, m_copies: int) -> float:
    fidelity = _require_fidelity(fidelity, allow_zero=False)
    m_copies = require_copies(m_copies)
    return 0.5 * (1.0 - math.sqrt(1.0 - fidelity ** m_copies))


def pure_pure_helstrom(fidelity: float, m_copies: int) -> float:
    """
    Exact minimum error probability for M copies of two pure states.
    """
    fidelity = _require_fidelity(fidelity, allow_zero=True)
    m_copies = require_copies(m_copies)
    return 0.5 * (1.0 - math.sqrt(1.0 - fidelity ** m_copies))


def discrimination_bounds(
    state0: GaussianState,
    state1: GaussianState,
    m_copies: int,
    helstrom_exact: Optional[float] = None,
) -> BoundSet:
    """
    Fidelity / Chernoff / Bhattacharyya bounds for a pure state0.
    """
    m_copies = require_copies(m_copies)
    fidelity = gaussian_fidelity_pure_mixed(state0, state1)
    if helstrom_exact is None and state1.is_pure():
        helstrom_exact = pure_pure_helstrom(fidelity, m_copies)

    return BoundSet(
        m_copies=m_copies,
        fidelity_lower=fidelity_lower_bound(fidelity, m_copies),
        qcb=qcb(state0, state1, m_copies),
        qbb=qbb(state0, state1, m_copies),
        helstrom_exact=helstrom_exact,
    )


# -------- ASYMMETRIC BOUNDS --------

def _hoeffding_p(kernel: _OverlapKernel, r: float, s: float) -> float:
    return (-r * s - kernel.log_overlap(s)) / (1.0 - s)


def qhb_numeric(
    state0: GaussianState,
    state1: GaussianState,
    r: float,
    n_grid: int = S_GRID_POINTS,
    divergence_cap: float = DIVERGENCE_CAP,
) -> HoeffdingResult:
    """
    Quantum Hoeffding bound H(r) = sup_{0 <= s < 1} P(r, s).

    The supremum is declared infinite when it exceeds divergence_cap, or when
    P is still increasing at s = 1 - 1e-6 and already above 50. A finite
    supremum found at the upper edge of the s grid is reported as boundary.
    """
    r = require_nonnegative("r", r)
    kernel = _OverlapKernel(state0, state1)

    result = grid_golden_minimize(lambda s: -_hoeffding_p(kernel, r, s), n_grid=n_grid, edge=S_EDGE, tol=S_TOLERANCE)
    h_value, s_star = -result.minimum, result.argmin

    # s = 0 end of the closed interval
    at_zero = -math.log(kernel.limit_at_zero())
    if at_zero >= h_value:
        h_value, s_star = at_zero, 0.0

    p_near_one = _hoeffding_p(kernel, r, 1.0 - 1e-6)
    p_before = _hoeffding_p(kernel, r, 1.0 - 2e-6)
    still_rising = p_near_one > p_before and p_near_one > DIVERGENCE_FLOOR
    if h_value > divergence_cap or still_rising:
        logger.debug("H(%.6g) diverges: sup %.6g, P(1-1e-6) = %.6g", r, h_value, p_near_one)
        return _infinite(r)

    classification = Classification.BOUNDARY if s_star > 1.0 - S_EDGE else Classification.FINITE
    return HoeffdingResult(r=r, h_value=max(h_value, 0.0), s_star=s_star, classification=classification)


def hoeffding_from_exponent(neg_log_fidelity: float, r: float) -> HoeffdingResult:
    """
    Piecewise Hoeffding bound keyed on the exponent -ln F:
    H(r) = -ln F for r >= -ln F, +inf below.
    """
    exponent = require_nonnegative("-ln F", neg_log_fidelity)
    r = require_nonnegative("r", r)

    if abs(r - exponent) < BOUNDARY_TOL:
        return HoeffdingResult(r=r, h_value=exponent, s_star=0.0, classification=Classification.BOUNDARY)
    if r > exponent:
        return HoeffdingResult(r=r, h_value=exponent, s_star=0.0, classification=Classification.FINITE)
    return _infinite(r)


def hoeffding_pure_piecewise(fidelity: float, r: float) -> HoeffdingResult:
    fidelity = _require_fidelity(fidelity, allow_zero=False)
    return hoeffding_from_exponent(-math.log(fidelity), r)


def bayes_cost(c01: float, c10: float, p0: float, p1: float, p_fp: float, p_fn: float) -> float:
    """
    C10 p0 p(1|0) + C01 p1 p(0|1).
    """
    c01 = require_nonnegative("c01", c01)
    c10 = require_nonnegative("c10", c10)
    p0 = require_unit_interval("p0", p0)
    p1 = require_unit_interval("p1", p1)
    p_fp = require_unit_interval("p_fp", p_fp)
    p_fn = require_unit_interval("p_fn", p_fn)
    if abs(p0 + p1 - 1.0) > 1e-12:
        raise DomainError(f"priors must sum to 1, got {p0} + {p1}")
    return c10 * p0 * p_fp + c01 * p1 * p_fn
