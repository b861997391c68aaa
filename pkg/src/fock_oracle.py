"""
Brute-force Fock-space reference for the Gaussian closed forms.

States are built as explicit truncated vectors and density matrices, loss is
applied with the Kraus operators of the pure-loss channel, and overlaps,
fidelities and the Helstrom error come from Hermitian eigendecompositions.
This is a desk-scale validator: matrices are cutoff^n_modes on a side.

Two-mode index convention: index = s + cutoff * r, i.e. the vector is
kron(reference, signal) and the signal index varies fastest.

Vectors are not renormalized after truncation, so the discarded tail stays
visible as TruncatedDensityMatrix.tail_mass. Overlap, fidelity and Helstrom
values are computed on the trace-normalized matrices.
"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.linalg import eigh, eigvalsh
from scipy.sparse import csr_matrix, dia_matrix
from scipy.sparse.csgraph import connected_components
from scipy.special import comb
from scipy.stats import poisson

from src.errors import DomainError, NumericError
from src.utils import require_finite, require_nonnegative, require_open_unit_interval, require_unit_interval


logger = logging.getLogger(__name__)

DEFAULT_CUTOFF = 40
DEFAULT_TAIL_TOL = 1e-12
HERMITIAN_TOL = 1e-12
# eigenvalues below this fraction of the largest are treated as exact zeros
RELATIVE_EIGEN_FLOOR = 1e-12
CLAMP_WARN = 1e-10
PURITY_TOL = 1e-8


# -------- TYPES --------

@dataclass(eq=False)
class TruncatedDensityMatrix:
    cutoff: int
    n_modes: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.n_modes not in (1, 2):
            raise DomainError(f"only 1 or 2 modes are supported, got {self.n_modes}")
        if self.cutoff < 1:
            raise DomainError(f"cutoff must be >= 1, got {self.cutoff}")
        dim = self.cutoff ** self.n_modes
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.shape != (dim, dim):
            raise DomainError(f"expected a {dim}x{dim} matrix, got {self.matrix.shape}")
        scale = max(1.0, float(np.max(np.abs(self.matrix))))
        if not np.allclose(self.matrix, self.matrix.conj().T, rtol=0.0, atol=HERMITIAN_TOL * scale):
            raise DomainError("density matrix is not Hermitian")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def tail_mass(self) -> float:
        return 1.0 - self.trace

    def normalized(self) -> "TruncatedDensityMatrix":
        trace = self.trace
        if trace <= 0.0:
            raise NumericError(f"cannot normalize a matrix with trace {trace}")
        return TruncatedDensityMatrix(self.cutoff, self.n_modes, self.matrix / trace)

    @cached_property
    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """
        (eigenvalues, eigenvectors as columns) restricted to the positive part
        of the spectrum after flooring.
        """
        blocks = _hermitian_blocks(self.matrix)
        floor = _spectrum_floor(np.concatenate([w for _, w, _ in blocks]))

        values, vectors = [], []
        for idx, w, v in blocks:
            for col in np.flatnonzero(w > floor):
                vec = np.zeros(self.dim, dtype=complex)
                vec[idx] = v[:, col]
                values.append(w[col])
                vectors.append(vec)

        if not values:
            raise NumericError("density matrix has no positive spectrum")
        return np.array(values), np.column_stack(vectors)

    def purity(self) -> float:
        rho = self.normalized().matrix
        return float(np.real(np.sum(rho.conj() * rho)))


# -------- LINEAR ALGEBRA --------

def _component_indices(matrix: np.ndarray) -> list[np.ndarray]:
    n_blocks, labels = connected_components(csr_matrix(np.abs(matrix) > 0.0), directed=False)
    order = np.argsort(labels, kind="stable")
    return np.split(order, np.cumsum(np.bincount(labels, minlength=n_blocks))[:-1])


def _hermitian_blocks(matrix: np.ndarray) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """
    Eigendecompose a Hermitian matrix one connected block of its sparsity
    pattern at a time. Returns (indices, eigenvalues, eigenvectors) per block.
    """
    blocks = []
    for idx in _component_indices(matrix):
        sub = matrix[np.ix_(idx, idx)]
        if idx.size == 1:
            blocks.append((idx, np.real(sub).ravel(), np.ones((1, 1), dtype=complex)))
        else:
            w, v = eigh(sub)
            blocks.append((idx, w, v))
    return blocks


def _spectrum_floor(eigenvalues: np.ndarray) -> float:
    lowest = float(eigenvalues.min())
    if lowest < -CLAMP_WARN:
        logger.warning("clamping negative eigenvalue %.3g to 0", lowest)
    return RELATIVE_EIGEN_FLOOR * max(float(eigenvalues.max()), 0.0)


def _hermitian_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    parts = [eigvalsh(matrix[np.ix_(idx, idx)]) for idx in _component_indices(matrix)]
    return np.concatenate(parts)


# -------- STATES --------

def choose_cutoff(
    nbar: Optional[float] = None,
    alpha: Optional[complex] = None,
    tol: float = DEFAULT_TAIL_TOL,
) -> int:
    """
    Smallest cutoff K whose discarded tail is below tol.

    For a TMSV with nbar photons per mode the tail is lambda^(2K),
    lambda^2 = nbar / (nbar + 1). For a coherent state it is the Poisson tail
    P(N >= K) with mean |alpha|^2.
    """
    if (nbar is None) == (alpha is None):
        raise DomainError("give exactly one of nbar or alpha")

    if nbar is not None:
        nbar = require_nonnegative("nbar", nbar)
        if nbar == 0.0:
            return 1
        lam2 = nbar / (nbar + 1.0)
        cutoff = int(math.floor(math.log(tol) / math.log(lam2))) + 1
    else:
        mean = abs(complex(alpha)) ** 2
        require_finite("|alpha|^2", mean)
        cutoff = 1
        while mean > 0.0 and poisson.sf(cutoff - 1, mean) >= tol:
            cutoff += 1

    logger.debug("cutoff %d for tail tolerance %.1g", cutoff, tol)
    return cutoff


def tmsv_fock(nbar: float, cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    """
    sum_n sqrt(1 - lambda^2) lambda^n |n, n>, lambda^2 = nbar / (nbar + 1).
    """
    nbar = require_nonnegative("nbar", nbar)
    if cutoff < 1:
        raise DomainError(f"cutoff must be >= 1, got {cutoff}")

    lam = math.sqrt(nbar / (nbar + 1.0))
    n = np.arange(cutoff)
    vector = np.zeros(cutoff * cutoff, dtype=complex)
    vector[n + cutoff * n] = math.sqrt(1.0 - lam ** 2) * lam ** n
    return vector


def coherent_fock(alpha: complex, cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    alpha = complex(alpha)
    require_finite("|alpha|", abs(alpha))
    if cutoff < 1:
        raise DomainError(f"cutoff must be >= 1, got {cutoff}")

    vector = np.zeros(cutoff, dtype=complex)
    vector[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, cutoff):
        vector[n] = vector[n - 1] * alpha / math.sqrt(n)
    return vector


def density_matrix(vector: np.ndarray, cutoff: int, n_modes: int) -> TruncatedDensityMatrix:
    vector = np.asarray(vector, dtype=complex)
    rho = TruncatedDensityMatrix(cutoff, n_modes, np.outer(vector, vector.conj()))
    if rho.tail_mass > DEFAULT_TAIL_TOL:
        logger.warning("cutoff %d leaves tail mass %.3g", cutoff, rho.tail_mass)
    return rho


# -------- LOSS --------

def _loss_weights(tau: float, cutoff: int) -> np.ndarray:
    """
    w[k, m] = sqrt(C(m, k) tau^(m-k) (1-tau)^k) for m >= k, zero otherwise.
    """
    m = np.arange(cutoff)
    weights = np.zeros((cutoff, cutoff))
    for k in range(cutoff):
        mk = m[k:]
        weights[k, k:] = np.sqrt(comb(mk, k) * tau ** (mk - k) * (1.0 - tau) ** k)
    return weights


def loss_kraus_operators(tau: float, cutoff: int) -> list[dia_matrix]:
    """
    A_k = sqrt((1-tau)^k / k!) tau^(n/2) a^k on the truncated space, k < cutoff.
    """
    tau = require_unit_interval("tau", tau)
    weights = _loss_weights(tau, cutoff)
    return [dia_matrix((weights[k][None, :], [k]), shape=(cutoff, cutoff)) for k in range(cutoff)]


def apply_loss_kraus(rho: TruncatedDensityMatrix, tau: float, mode: int) -> TruncatedDensityMatrix:
    """
    sum_k A_k rho A_k^dagger on one mode.

    A_k only shifts photon number down by k, so each term is a shifted,
    reweighted copy of rho along that mode's ket and bra axes.
    """
    tau = require_unit_interval("tau", tau)
    if not 0 <= mode < rho.n_modes:
        raise DomainError(f"mode {mode} out of range for a {rho.n_modes}-mode state")

    c, n = rho.cutoff, rho.n_modes
    ket_axis = n - 1 - mode
    bra_axis = n + ket_axis

    tensor = rho.matrix.reshape((c,) * (2 * n))
    moved = np.moveaxis(tensor, [ket_axis, bra_axis], [0, 1])
    out = np.zeros_like(moved)
    expand = (slice(None), slice(None)) + (None,) * (moved.ndim - 2)

    weights = _loss_weights(tau, c)
    for k in range(c):
        w = weights[k, k:]
        out[: c - k, : c - k] += np.outer(w, w)[expand] * moved[k:, k:]

    result = np.moveaxis(out, [0, 1], [ket_axis, bra_axis]).reshape(rho.matrix.shape)
    return TruncatedDensityMatrix(c, n, 0.5 * (result + result.conj().T))


# -------- REDUCTIONS --------

def partial_trace(rho: TruncatedDensityMatrix, keep_mode: int) -> TruncatedDensityMatrix:
    if rho.n_modes != 2:
        raise DomainError("partial trace needs a two-mode state")
    c = rho.cutoff
    tensor = rho.matrix.reshape(c, c, c, c)  # (r, s, r', s')
    if keep_mode == 0:
        reduced = np.einsum("rsrt->st", tensor)
    elif keep_mode == 1:
        reduced = np.einsum("rsts->rt", tensor)
    else:
        raise DomainError(f"keep_mode must be 0 (signal) or 1 (reference), got {keep_mode}")
    return TruncatedDensityMatrix(c, 1, reduced)


def mean_photon_number(rho: TruncatedDensityMatrix, mode: int = 0) -> float:
    single = partial_trace(rho, mode) if rho.n_modes == 2 else rho
    return float(np.real(np.arange(single.cutoff) @ np.diag(single.matrix)))


# -------- QUANTITIES --------

def _require_compatible(rho0: TruncatedDensityMatrix, rho1: TruncatedDensityMatrix) -> None:
    if rho0.cutoff != rho1.cutoff or rho0.n_modes != rho1.n_modes:
        raise DomainError("states live on different truncated spaces")


def s_overlap_fock(rho0: TruncatedDensityMatrix, rho1: TruncatedDensityMatrix, s: float) -> float:
    """
    Tr(rho0^s rho1^(1-s)) = sum_ij a_i^s b_j^(1-s) |<u_i|v_j>|^2.
    """
    s = require_open_unit_interval("s", s)
    _require_compatible(rho0, rho1)

    a, u = rho0.normalized().support
    b, v = rho1.normalized().support
    overlaps = np.abs(u.conj().T @ v) ** 2
    return float(a ** s @ overlaps @ b ** (1.0 - s))


def helstrom_fock(rho0: TruncatedDensityMatrix, rho1: TruncatedDensityMatrix) -> float:
    _require_compatible(rho0, rho1)
    diff = rho0.normalized().matrix - rho1.normalized().matrix
    trace_norm = float(np.sum(np.abs(_hermitian_eigenvalues(diff))))
    return float(np.clip(0.5 * (1.0 - 0.5 * trace_norm), 0.0, 0.5))


def fidelity_fock(rho0: TruncatedDensityMatrix, rho1: TruncatedDensityMatrix) -> float:
    """
    <phi|rho1|phi> for a pure rho0 = |phi><phi|.
    """
    _require_compatible(rho0, rho1)
    purity = rho0.purity()
    if abs(purity - 1.0) > PURITY_TOL:
        raise DomainError(f"first state must be pure, purity is {purity:.12g}")
    pure = rho0.normalized().matrix
    mixed = rho1.normalized().matrix
    return float(np.real(np.sum(pure.conj() * mixed)))
