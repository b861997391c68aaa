"""
Closed-form performance of the coherent-state and EPR (TMSV) transmitters
probing a lossy channel of transmissivity tau.

Throughout, x = 1 - sqrt(tau). A coherent transmitter spending N photons in
total has Helstrom error (1 - sqrt(1 - exp(-N x^2))) / 2 however the photons
are split across copies. An EPR transmitter sending M copies with nbar
photons each has Chernoff bound (1/2) (1 + nbar x)^(-2M).
"""
import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Literal, Optional, Union

from src.discrimination_bounds import (
    BOUNDARY_TOL,
    DIVERGENCE_CAP,
    Classification,
    HoeffdingResult,
    hoeffding_from_exponent,
    qhb_numeric,
)
from src.errors import DomainError, NumericError
from src.gaussian_core import loss_on_signal, tmsv_state
from src.optimize import S_GRID_POINTS
from src.utils import require_copies, require_nonnegative, require_unit_interval


logger = logging.getLogger(__name__)

BROADBAND: Literal["broadband"] = "broadband"
CopyCount = Union[int, Literal["broadband"]]

PLATEAU_TOL = 1e-6


class TransmitterKind(str, Enum):
    COHERENT = "coherent"
    EPR = "epr"


class ConstraintKind(str, Enum):
    LOCAL = "local"
    GLOBAL = "global"


class RatioClass(str, Enum):
    FINITE = "finite"
    ZERO = "zero"
    INFINITE = "infinite"
    INDETERMINATE = "indeterminate"


def _loss_gap(tau: float) -> float:
    return 1.0 - math.sqrt(require_unit_interval("tau", tau))


# -------- COHERENT TRANSMITTER --------

def coherent_error(total_nbar: float, tau: float) -> float:
    total_nbar = require_nonnegative("total_nbar", total_nbar)
    x = _loss_gap(tau)
    return 0.5 * (1.0 - math.sqrt(-math.expm1(-total_nbar * x * x)))


def coherent_qcb(total_nbar: float, tau: float) -> float:
    total_nbar = require_nonnegative("total_nbar", total_nbar)
    x = _loss_gap(tau)
    return 0.5 * math.exp(-total_nbar * x * x)


def coherent_qhb(nbar: float, tau: float, r: float) -> HoeffdingResult:
    """
    n x^2 for r >= n x^2, +inf below (super-exponential decay).
    """
    nbar = require_nonnegative("nbar", nbar)
    x = _loss_gap(tau)
    return hoeffding_from_exponent(nbar * x * x, r)


# -------- EPR TRANSMITTER --------

def epr_qcb(nbar: float, tau: float, m_copies: int) -> float:
    nbar = require_nonnegative("nbar", nbar)
    m_copies = require_copies(m_copies)
    x = _loss_gap(tau)
    return 0.5 * math.exp(-2.0 * m_copies * math.log1p(nbar * x))


def epr_qcb_broadband(total_nbar: float, tau: float) -> float:
    """
    M -> infinity at fixed total energy: (1/2) exp(-2 N x).
    """
    total_nbar = require_nonnegative("total_nbar", total_nbar)
    x = _loss_gap(tau)
    return 0.5 * math.exp(-2.0 * total_nbar * x)


def epr_overlap(nbar: float, tau: float, s: float) -> float:
    """
    s-overlap of the TMSV and its lossy output,
    C_s = (1 + nbar x)^(-2) (1 + nbar (1 - tau))^s.

    Only the no-photon-lost branch of the loss channel overlaps the input,
    which gives the product form. C_0 is the fidelity.
    """
    nbar = require_nonnegative("nbar", nbar)
    tau = require_unit_interval("tau", tau)
    s = require_unit_interval("s", s)
    x = 1.0 - math.sqrt(tau)
    return math.exp(-2.0 * math.log1p(nbar * x) + s * math.log1p(nbar * (1.0 - tau)))


def epr_qhb_divergence_threshold(nbar: float, tau: float) -> float:
    """
    Smallest r for which the EPR Hoeffding bound is finite:
    2 ln(1 + nbar x) - ln(1 + nbar (1 - tau)).
    """
    nbar = require_nonnegative("nbar", nbar)
    tau = require_unit_interval("tau", tau)
    x = 1.0 - math.sqrt(tau)
    return max(2.0 * math.log1p(nbar * x) - math.log1p(nbar * (1.0 - tau)), 0.0)


def epr_qhb_closed_form(nbar: float, tau: float, r: float) -> HoeffdingResult:
    """
    With the product form of C_s, P(r, s) = (A - s B) / (1 - s), A = -ln F,
    B = r + ln(1 + nbar (1 - tau)). The supremum is A (at s = 0) when B >= A
    and diverges as s -> 1 otherwise.
    """
    r = require_nonnegative("r", r)
    plateau = 2.0 * math.log1p(require_nonnegative("nbar", nbar) * _loss_gap(tau))
    threshold = epr_qhb_divergence_threshold(nbar, tau)

    if abs(r - threshold) < BOUNDARY_TOL:
        return HoeffdingResult(r=r, h_value=plateau, s_star=0.0, classification=Classification.BOUNDARY)
    if r > threshold:
        return HoeffdingResult(r=r, h_value=plateau, s_star=0.0, classification=Classification.FINITE)
    return HoeffdingResult(r=r, h_value=math.inf, s_star=None, classification=Classification.INFINITE)


def epr_qhb(
    nbar: float,
    tau: float,
    r: float,
    n_grid: int = S_GRID_POINTS,
    divergence_cap: float = DIVERGENCE_CAP,
) -> HoeffdingResult:
    """
    Numerical Hoeffding bound of the TMSV against its lossy output, checked
    against the 2 ln(1 + nbar x) plateau when r is clearly above threshold.
    """
    tmsv = tmsv_state(nbar)
    result = qhb_numeric(tmsv, loss_on_signal(tmsv, tau), r, n_grid=n_grid, divergence_cap=divergence_cap)

    closed = epr_qhb_closed_form(nbar, tau, r)
    clearly_above = r > epr_qhb_divergence_threshold(nbar, tau) + 1e-9
    if clearly_above and not result.is_infinite and abs(result.h_value - closed.h_value) > PLATEAU_TOL:
        raise NumericError(
            f"numerical QHB {result.h_value:.9g} disagrees with plateau {closed.h_value:.9g} "
            f"(nbar={nbar}, tau={tau}, r={r})"
        )
    return result


# -------- GAINS AND EXPONENTS --------

def gain(nbar: float, tau: float, m_copies: int) -> float:
    """
    Delta = p_coh(M nbar) - p_QCB,EPR(nbar, M); positive means the EPR
    transmitter provably wins.
    """
    m_copies = require_copies(m_copies)
    return coherent_error(m_copies * nbar, tau) - epr_qcb(nbar, tau, m_copies)


def optimal_gain(total_nbar: float, tau: float) -> float:
    return coherent_error(total_nbar, tau) - epr_qcb_broadband(total_nbar, tau)


def near_transparency_gain(nbar: float, eps: float) -> float:
    """
    First-order gain at tau = 1 - eps: p_coh ~ 1/2 - sqrt(nbar) eps / 4 and
    p_QCB,EPR ~ 1/2 - nbar eps / 2.
    """
    nbar = require_nonnegative("nbar", nbar)
    eps = require_unit_interval("eps", eps)
    return (2.0 * nbar - math.sqrt(nbar)) * eps / 4.0


def error_exponents(nbar: float, tau: float) -> tuple[float, float]:
    """
    (kappa_coh, kappa_quant) = (nbar x^2, 2 ln(1 + nbar x)).
    """
    nbar = require_nonnegative("nbar", nbar)
    x = _loss_gap(tau)
    return nbar * x * x, 2.0 * math.log1p(nbar * x)


def qhb_thresholds(nbar: float, tau: float) -> tuple[float, float]:
    """
    (r_coh, r_quant): the r at which each Hoeffding bound reaches its plateau.
    """
    return error_exponents(nbar, tau)


def rate_ratio(nbar: float, tau: float) -> float:
    """
    R = kappa_quant / kappa_coh.

    tau = 1 is a 0/0 form and returns 1 by convention. At nbar = 0 the
    ratio is the limit 2 / x.
    """
    nbar = require_nonnegative("nbar", nbar)
    x = _loss_gap(tau)
    if x == 0.0:
        return 1.0
    if nbar == 0.0:
        return 2.0 / x
    kappa_coh, kappa_quant = error_exponents(nbar, tau)
    return kappa_quant / kappa_coh


@dataclass(frozen=True)
class QhbRatio:
    value: Optional[float]
    classification: RatioClass

    def serialize(self) -> Union[float, str]:
        if self.classification is RatioClass.INDETERMINATE:
            return "indeterminate"
        if self.classification is RatioClass.INFINITE:
            return "inf"
        return self.value


def qhb_ratio(nbar: float, tau: float, r: float) -> QhbRatio:
    """
    R_QHB(r) = H_quant(r) / H_coh(r).

    Below both plateau thresholds the ratio is reported as indeterminate even
    where the exact EPR bound is already finite.
    """
    r = require_nonnegative("r", r)
    r_coh, r_quant = qhb_thresholds(nbar, tau)
    if r < min(r_coh, r_quant) - BOUNDARY_TOL:
        logger.debug("r=%.6g below both thresholds (%.6g, %.6g)", r, r_coh, r_quant)
        return QhbRatio(None, RatioClass.INDETERMINATE)

    h_coh = coherent_qhb(nbar, tau, r)
    h_quant = epr_qhb_closed_form(nbar, tau, r)

    if h_coh.is_infinite and h_quant.is_infinite:
        return QhbRatio(None, RatioClass.INDETERMINATE)
    if h_coh.is_infinite:
        return QhbRatio(0.0, RatioClass.ZERO)
    if h_quant.is_infinite:
        return QhbRatio(math.inf, RatioClass.INFINITE)
    if h_coh.h_value == 0.0:
        return QhbRatio(rate_ratio(nbar, tau), RatioClass.FINITE)
    return QhbRatio(h_quant.h_value / h_coh.h_value, RatioClass.FINITE)


# -------- CONFIGURATIONS --------

@dataclass(frozen=True)
class TransmitterConfig:
    kind: TransmitterKind
    nbar: float
    m_copies: CopyCount = 1
    constraint: ConstraintKind = ConstraintKind.LOCAL
    total_nbar: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", TransmitterKind(self.kind))
        object.__setattr__(self, "constraint", ConstraintKind(self.constraint))
        require_nonnegative("nbar", self.nbar)

        if self.m_copies == BROADBAND:
            if self.constraint is not ConstraintKind.GLOBAL:
                raise DomainError("broadband transmitters need a global energy constraint")
        else:
            require_copies(self.m_copies)

        if self.constraint is ConstraintKind.GLOBAL:
            if self.total_nbar is None:
                raise DomainError("global constraint needs total_nbar")
            require_nonnegative("total_nbar", self.total_nbar)
            if self.m_copies != BROADBAND and abs(self.nbar * self.m_copies - self.total_nbar) > 1e-12 * max(1.0, self.total_nbar):
                raise DomainError(f"nbar * M = {self.nbar * self.m_copies} does not match total_nbar = {self.total_nbar}")

    @classmethod
    def with_total(cls, kind: TransmitterKind, total_nbar: float, m_copies: CopyCount = 1) -> "TransmitterConfig":
        """
        Spread a global photon budget evenly over M copies.
        """
        total_nbar = require_nonnegative("total_nbar", total_nbar)
        nbar = 0.0 if m_copies == BROADBAND else total_nbar / require_copies(m_copies)
        return cls(kind, nbar, m_copies, ConstraintKind.GLOBAL, total_nbar)

    def at_total(self, total_nbar: float) -> "TransmitterConfig":
        return TransmitterConfig.with_total(self.kind, total_nbar, self.m_copies)

    @property
    def total(self) -> float:
        if self.constraint is ConstraintKind.GLOBAL:
            return self.total_nbar
        return self.nbar * self.m_copies

    @property
    def label(self) -> str:
        if self.kind is TransmitterKind.COHERENT:
            return "coherent"
        return f"epr_{'broadband' if self.m_copies == BROADBAND else f'm{self.m_copies}'}"

    def error_probability(self, tau: float) -> float:
        """
        Helstrom error for coherent light, Chernoff bound for EPR.
        """
        if self.kind is TransmitterKind.COHERENT:
            return coherent_error(self.total, tau)
        if self.m_copies == BROADBAND:
            return epr_qcb_broadband(self.total, tau)
        return epr_qcb(self.nbar, tau, self.m_copies)


def transmitter_error(kind: TransmitterKind, m_copies: CopyCount, total_nbar: float, tau: float) -> float:
    return TransmitterConfig.with_total(kind, total_nbar, m_copies).error_probability(tau)


# -------- COMPARISON --------

@dataclass(frozen=True)
class ComparisonPoint:
    nbar: float
    tau: float
    m_copies: int
    p_coh: float
    p_quant_qcb: float
    p_quant_broadband: float
    delta: float
    kappa_coh: float
    kappa_quant: float
    rate_ratio: float
    r_coh: float
    r_quant: float
    r_divergence: float
    r: Optional[float] = None
    h_coh: Optional[HoeffdingResult] = None
    h_quant: Optional[HoeffdingResult] = None
    qhb_ratio: Optional[QhbRatio] = None

    def to_dict(self) -> dict:
        """
        Flat record; infinite bounds are written as "inf".
        """
        record = asdict(self)
        for key in ("h_coh", "h_quant"):
            result = getattr(self, key)
            flat = result.to_dict() if result is not None else {}
            record[key] = flat.get("h_value")
            record[f"{key}_s_star"] = flat.get("s_star")
            record[f"{key}_classification"] = flat.get("classification")
        if self.qhb_ratio is not None:
            record["qhb_ratio"] = self.qhb_ratio.serialize()
            record["qhb_ratio_classification"] = self.qhb_ratio.classification.value
        return record


def compare(
    nbar: float,
    tau: float,
    m_copies: int = 1,
    r: Optional[float] = None,
    numeric_qhb: bool = True,
    n_grid: int = S_GRID_POINTS,
    divergence_cap: float = DIVERGENCE_CAP,
) -> ComparisonPoint:
    """
    Evaluate both transmitters at one (nbar, tau, M) point.

    When r is given, the EPR Hoeffding bound comes from the numerical search
    (numeric_qhb=True) or from the closed form.
    """
    m_copies = require_copies(m_copies)
    p_coh = coherent_error(m_copies * nbar, tau)
    p_quant = epr_qcb(nbar, tau, m_copies)
    kappa_coh, kappa_quant = error_exponents(nbar, tau)

    h_coh = h_quant = ratio = None
    if r is not None:
        h_coh = coherent_qhb(nbar, tau, r)
        if numeric_qhb:
            h_quant = epr_qhb(nbar, tau, r, n_grid=n_grid, divergence_cap=divergence_cap)
        else:
            h_quant = epr_qhb_closed_form(nbar, tau, r)
        ratio = qhb_ratio(nbar, tau, r)

    return ComparisonPoint(
        nbar=nbar,
        tau=tau,
        m_copies=m_copies,
        p_coh=p_coh,
        p_quant_qcb=p_quant,
        p_quant_broadband=epr_qcb_broadband(m_copies * nbar, tau),
        delta=p_coh - p_quant,
        kappa_coh=kappa_coh,
        kappa_quant=kappa_quant,
        rate_ratio=rate_ratio(nbar, tau),
        r_coh=kappa_coh,
        r_quant=kappa_quant,
        r_divergence=epr_qhb_divergence_threshold(nbar, tau),
        r=r,
        h_coh=h_coh,
        h_quant=h_quant,
        qhb_ratio=ratio,
    )
