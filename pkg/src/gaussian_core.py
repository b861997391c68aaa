"""
Gaussian states of one or two bosonic modes and the channels acting on them.

Conventions
-----------
Quadratures are ordered (q_1, p_1, q_2, p_2) with mode 1 the signal S and
mode 2 the reference R. Vacuum noise is normalized to 1, so the vacuum CM is
the identity and a coherent state |alpha> has mean (2 Re alpha, 2 Im alpha).
With that factor the Gaussian fidelity of |alpha> and |beta> is exactly
exp(-|alpha - beta|^2).
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag, sqrtm

from src.errors import DegenerateSpectrumError, DomainError, UnsupportedFormError
from src.utils import require_finite, require_nonnegative, require_unit_interval


logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9
DEGENERACY_TOL = 1e-12
NORMAL_FORM_TOL = 1e-12

PAULI_Z = np.diag([1.0, -1.0])
IDENTITY_2 = np.eye(2)
MODE_SWAP = np.kron(np.array([[0.0, 1.0], [1.0, 0.0]]), IDENTITY_2)


def symplectic_form(n_modes: int) -> np.ndarray:
    omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return block_diag(*([omega] * n_modes))


def _check_symmetric(cm: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(cm))))
    if not np.allclose(cm, cm.T, rtol=0.0, atol=SYMMETRY_TOL * scale):
        raise DomainError("covariance matrix is not symmetric")


def symplectic_eigenvalues(cm: np.ndarray) -> np.ndarray:
    """
    Symplectic spectrum of a 2n x 2n CM, ascending, one value per mode.

    Uses the moduli of the eigenvalues of i*Omega*V, which come in +/- pairs.
    """
    cm = np.asarray(cm, dtype=float)
    n_modes = cm.shape[0] // 2
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(n_modes) @ cm)))
    return moduli[::2]


# -------- TYPES --------

@dataclass(eq=False)
class GaussianState:
    n_modes: int
    mean: np.ndarray
    cm: np.ndarray

    def __post_init__(self) -> None:
        if self.n_modes not in (1, 2):
            raise DomainError(f"only 1 or 2 modes are supported, got {self.n_modes}")
        self.mean = np.asarray(self.mean, dtype=float).reshape(-1)
        self.cm = np.asarray(self.cm, dtype=float)

        dim = 2 * self.n_modes
        if self.mean.shape != (dim,) or self.cm.shape != (dim, dim):
            raise DomainError(f"{self.n_modes}-mode state needs a length-{dim} mean and a {dim}x{dim} CM")
        if not (np.all(np.isfinite(self.mean)) and np.all(np.isfinite(self.cm))):
            raise DomainError("state moments must be finite")
        _check_symmetric(self.cm)

        nu = symplectic_eigenvalues(self.cm)
        if nu.min() < 1.0 - PHYSICALITY_TOL:
            raise DomainError(f"unphysical CM: symplectic eigenvalue {nu.min():.12g} < 1")

    @property
    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.cm)

    def is_pure(self, atol: float = 1e-6) -> bool:
        return bool(np.all(np.abs(self.symplectic_eigenvalues - 1.0) <= atol))

    def to_dict(self) -> dict:
        return {"n_modes": self.n_modes, "mean": self.mean.tolist(), "cm": self.cm.tolist()}


@dataclass(frozen=True)
class NormalFormCM:
    """
    Two-mode CM [[a I, c Z], [c Z, b I]].
    """

    a: float
    b: float
    c: float

    @property
    def y(self) -> float:
        return (self.a + self.b) ** 2 - 4.0 * self.c ** 2

    def to_matrix(self) -> np.ndarray:
        return np.block([
            [self.a * IDENTITY_2, self.c * PAULI_Z],
            [self.c * PAULI_Z, self.b * IDENTITY_2],
        ])

    @classmethod
    def from_cm(cls, cm: np.ndarray) -> "NormalFormCM":
        cm = np.asarray(cm, dtype=float)
        if cm.shape != (4, 4):
            raise UnsupportedFormError(f"normal form needs a 4x4 CM, got shape {cm.shape}")

        a, b, c = cm[0, 0], cm[2, 2], cm[0, 2]
        candidate = cls(float(a), float(b), float(c))
        scale = max(1.0, float(np.max(np.abs(cm))))
        if not np.allclose(cm, candidate.to_matrix(), rtol=0.0, atol=NORMAL_FORM_TOL * scale):
            raise UnsupportedFormError("CM is not of the form [[aI, cZ], [cZ, bI]]")
        if c < 0.0:
            raise UnsupportedFormError(f"normal form needs c >= 0, got c = {c}")
        return candidate


@dataclass(frozen=True)
class SymplecticDecomposition:
    """
    V = S diag(nu_minus, nu_minus, nu_plus, nu_plus) S^T for two modes, or
    V = S diag(nu, nu) S^T for one mode (nu_minus == nu_plus == nu).

    nu_minus <= nu_plus; s_matrix pairs nu_minus with the first mode.
    """

    nu_minus: float
    nu_plus: float
    s_matrix: np.ndarray = field(repr=False)

    @property
    def n_modes(self) -> int:
        return self.s_matrix.shape[0] // 2

    @property
    def mode_eigenvalues(self) -> np.ndarray:
        if self.n_modes == 1:
            return np.array([self.nu_minus])
        return np.array([self.nu_minus, self.nu_plus])

    def williamson_diagonal(self) -> np.ndarray:
        return np.repeat(self.mode_eigenvalues, 2)

    def reconstruct(self) -> np.ndarray:
        return self.s_matrix @ np.diag(self.williamson_diagonal()) @ self.s_matrix.T


@dataclass(frozen=True)
class GaussianChannelSpec:
    """
    Single-mode Gaussian channel x -> K x + d, V -> K V K^T + N.
    """

    k_matrix: np.ndarray
    n_matrix: np.ndarray
    d: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self) -> None:
        k = np.asarray(self.k_matrix, dtype=float)
        n = np.asarray(self.n_matrix, dtype=float)
        d = np.asarray(self.d, dtype=float).reshape(-1)
        if k.shape != (2, 2) or n.shape != (2, 2) or d.shape != (2,):
            raise DomainError("single-mode channel needs 2x2 K and N and a length-2 d")
        if not np.allclose(n, n.T, rtol=0.0, atol=SYMMETRY_TOL):
            raise DomainError("channel noise matrix N must be symmetric")
        object.__setattr__(self, "k_matrix", k)
        object.__setattr__(self, "n_matrix", n)
        object.__setattr__(self, "d", d)


# -------- STATES --------

def vacuum_state(n_modes: int = 1) -> GaussianState:
    return GaussianState(n_modes, np.zeros(2 * n_modes), np.eye(2 * n_modes))


def thermal_state(nbar: float) -> GaussianState:
    nbar = require_nonnegative("nbar", nbar)
    return GaussianState(1, np.zeros(2), (2.0 * nbar + 1.0) * IDENTITY_2)


def tmsv_state(nbar: float) -> GaussianState:
    """
    Two-mode squeezed vacuum with nbar mean photons per mode, mu = 2 nbar + 1.
    """
    nbar = require_nonnegative("nbar", nbar)
    mu = 2.0 * nbar + 1.0
    c = np.sqrt(mu ** 2 - 1.0)
    cm = NormalFormCM(mu, mu, c).to_matrix()
    return GaussianState(2, np.zeros(4), cm)


def coherent_state(alpha: complex) -> GaussianState:
    alpha = complex(alpha)
    require_finite("Re(alpha)", alpha.real)
    require_finite("Im(alpha)", alpha.imag)
    return GaussianState(1, np.array([2.0 * alpha.real, 2.0 * alpha.imag]), np.eye(2))


# -------- CHANNELS --------

def lossy_channel(tau: float) -> GaussianChannelSpec:
    tau = require_unit_interval("tau", tau)
    return GaussianChannelSpec(np.sqrt(tau) * IDENTITY_2, (1.0 - tau) * IDENTITY_2, np.zeros(2))


def apply_channel(state: GaussianState, spec: GaussianChannelSpec, target_mode: int) -> GaussianState:
    """
    Apply a single-mode channel to one mode of a state, identity on the rest.
    """
    if not 0 <= target_mode < state.n_modes:
        raise DomainError(f"target mode {target_mode} out of range for a {state.n_modes}-mode state")

    dim = 2 * state.n_modes
    sl = slice(2 * target_mode, 2 * target_mode + 2)

    k_full = np.eye(dim)
    k_full[sl, sl] = spec.k_matrix
    n_full = np.zeros((dim, dim))
    n_full[sl, sl] = spec.n_matrix
    d_full = np.zeros(dim)
    d_full[sl] = spec.d

    cm = k_full @ state.cm @ k_full.T + n_full
    mean = k_full @ state.mean + d_full
    return GaussianState(state.n_modes, mean, 0.5 * (cm + cm.T))


def beam_splitter(tau: float) -> np.ndarray:
    """
    Symplectic matrix of a beam splitter of transmissivity tau acting on
    modes (v, S); the environment v enters in vacuum.
    """
    tau = require_unit_interval("tau", tau)
    t, r = np.sqrt(tau), np.sqrt(1.0 - tau)
    return np.block([[t * IDENTITY_2, r * IDENTITY_2], [-r * IDENTITY_2, t * IDENTITY_2]])


def _require_two_modes(state: GaussianState) -> None:
    if state.n_modes != 2:
        raise DomainError(f"expected a two-mode (signal, reference) state, got {state.n_modes} mode(s)")


def loss_on_signal(tmsv: GaussianState, tau: float) -> GaussianState:
    """
    Send the signal mode through a lossy channel, keep the reference ideal.
    """
    _require_two_modes(tmsv)
    return apply_channel(tmsv, lossy_channel(tau), target_mode=0)


def loss_on_signal_dilated(tmsv: GaussianState, tau: float) -> GaussianState:
    """
    Same map as loss_on_signal, computed by mixing the signal with a vacuum
    environment on a beam splitter and tracing the environment out.
    """
    _require_two_modes(tmsv)
    bs = block_diag(beam_splitter(tau), IDENTITY_2)

    # modes (v, S, R)
    cm_in = block_diag(IDENTITY_2, tmsv.cm)
    mean_in = np.concatenate([np.zeros(2), tmsv.mean])

    cm_out = bs @ cm_in @ bs.T
    mean_out = bs @ mean_in
    cm = cm_out[2:6, 2:6]
    return GaussianState(2, mean_out[2:6], 0.5 * (cm + cm.T))


# -------- SYMPLECTIC DECOMPOSITION --------

def normal_form_decompose(nf: NormalFormCM) -> SymplecticDecomposition:
    """
    Closed-form Williamson decomposition of a normal-form two-mode CM.

        nu_pm = (sqrt(y) +/- (b - a)) / 2
        omega_pm = sqrt((a + b +/- sqrt(y)) / (2 sqrt(y)))
        S = [[omega_+ I, omega_- Z], [omega_- Z, omega_+ I]]

    For a > b the form is decomposed with the modes swapped and S picks up
    the swap, so nu_minus <= nu_plus always.
    """
    a, b, c = float(nf.a), float(nf.b), float(nf.c)
    for name, value in (("a", a), ("b", b), ("c", c)):
        require_finite(name, value)
    if c < 0.0:
        raise UnsupportedFormError(f"normal form needs c >= 0, got c = {c}")

    y = nf.y
    if y <= DEGENERACY_TOL:
        raise DegenerateSpectrumError(f"degenerate normal form: y = {y:.3g}")
    if a > b:
        swapped = normal_form_decompose(NormalFormCM(b, a, c))
        return SymplecticDecomposition(swapped.nu_minus, swapped.nu_plus, MODE_SWAP @ swapped.s_matrix)

    sqrt_y = np.sqrt(y)
    nu_plus = 0.5 * (sqrt_y + (b - a))
    nu_minus = 0.5 * (sqrt_y - (b - a))
    omega_plus = np.sqrt((a + b + sqrt_y) / (2.0 * sqrt_y))
    omega_minus = np.sqrt(max(a + b - sqrt_y, 0.0) / (2.0 * sqrt_y))

    s_matrix = np.block([
        [omega_plus * IDENTITY_2, omega_minus * PAULI_Z],
        [omega_minus * PAULI_Z, omega_plus * IDENTITY_2],
    ])
    logger.debug("normal form (%.6g, %.6g, %.6g): nu = (%.9g, %.9g)", a, b, c, nu_minus, nu_plus)
    return SymplecticDecomposition(float(nu_minus), float(nu_plus), s_matrix)


def symplectic_spectrum_generic(cm: np.ndarray) -> tuple[float, float]:
    cm = np.asarray(cm, dtype=float)
    if cm.shape != (4, 4):
        raise DomainError(f"expected a 4x4 CM, got shape {cm.shape}")
    _check_symmetric(cm)
    nu = symplectic_eigenvalues(cm)
    return float(nu[0]), float(nu[1])


def williamson(state: GaussianState) -> SymplecticDecomposition:
    """
    Symplectic decomposition of a one-mode CM or a two-mode normal-form CM.
    """
    if state.n_modes == 1:
        nu = float(np.sqrt(np.linalg.det(state.cm)))
        s_matrix = np.real(sqrtm(state.cm / nu))
        return SymplecticDecomposition(nu, nu, s_matrix)
    return normal_form_decompose(NormalFormCM.from_cm(state.cm))
