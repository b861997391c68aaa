"""
One-dimensional search over the overlap parameter s.

Both the Chernoff infimum and the Hoeffding supremum are found the same way:
a uniform grid locates the best point, then golden-section search refines
inside the bracket formed by its neighbours.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from src.errors import DomainError


logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

S_GRID_POINTS = 200
S_EDGE = 1e-4
S_TOLERANCE = 1e-9
MAX_ITERATIONS = 200


@dataclass(frozen=True)
class SearchResult:
    argmin: float
    minimum: float
    iterations: int
    converged: bool


def golden_section_minimize(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = S_TOLERANCE,
    max_iter: int = MAX_ITERATIONS,
) -> SearchResult:
    """
    Minimize a unimodal function on the open interval (lo, hi).

    The endpoints themselves are never evaluated, so f may be singular there.
    """
    if not hi > lo:
        raise DomainError(f"empty bracket [{lo}, {hi}]")

    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1 = f(x1)
    f2 = f(x2)

    iteration = 0
    while iteration < max_iter and (hi - lo) > tol:
        if f2 > f1:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = f(x2)
        iteration += 1

    if f1 <= f2:
        best_x, best_f = x1, f1
    else:
        best_x, best_f = x2, f2

    converged = iteration < max_iter and math.isfinite(best_f)
    if not converged:
        logger.warning("golden section stopped after %d iterations, width %.3g", iteration, hi - lo)
    return SearchResult(argmin=best_x, minimum=best_f, iterations=iteration, converged=converged)


def grid_golden_minimize(
    f: Callable[[float], float],
    n_grid: int = S_GRID_POINTS,
    edge: float = S_EDGE,
    tol: float = S_TOLERANCE,
) -> SearchResult:
    """
    Minimize f over s in (0, 1).

    Parameters
    ----------
    f: Callable[[float], float]
        Objective, evaluated only strictly inside (0, 1).
    n_grid: int
        Number of uniform grid points on [edge, 1 - edge].
    edge: float
        Distance of the outermost grid points from 0 and 1.
    tol: float
        Absolute tolerance in s for the golden-section refinement.
    """
    if n_grid < 2:
        raise DomainError(f"s grid needs at least 2 points, got {n_grid}")

    grid = np.linspace(edge, 1.0 - edge, n_grid)
    values = np.array([f(float(s)) for s in grid])
    if not np.all(np.isfinite(values)):
        finite = np.isfinite(values)
        if not finite.any():
            raise DomainError("objective is not finite anywhere on the s grid")
        values = np.where(finite, values, np.inf)

    k = int(np.argmin(values))
    # neighbours bracket the minimum; past the outer grid points use 0 and 1
    lo = float(grid[k - 1]) if k > 0 else 0.0
    hi = float(grid[k + 1]) if k < n_grid - 1 else 1.0
    logger.debug("grid minimum at s=%.6g, refining on [%.6g, %.6g]", grid[k], lo, hi)

    refined = golden_section_minimize(f, lo, hi, tol=tol)
    if refined.minimum <= values[k]:
        return refined
    return SearchResult(argmin=float(grid[k]), minimum=float(values[k]), iterations=refined.iterations, converged=refined.converged)
