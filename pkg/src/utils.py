"""
Argument checks shared by the model modules.

Each helper returns the value as a float/int so call sites can validate and
convert in one line.
"""
import math

from src.errors import DomainError


def require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")
    return value


def require_nonnegative(name: str, value: float) -> float:
    value = require_finite(name, value)
    if value < 0.0:
        raise DomainError(f"{name} must be >= 0, got {value}")
    return value


def require_positive(name: str, value: float) -> float:
    value = require_finite(name, value)
    if value <= 0.0:
        raise DomainError(f"{name} must be > 0, got {value}")
    return value


def require_unit_interval(name: str, value: float) -> float:
    """
    Closed interval [0, 1]: transmissivities and probabilities.
    """
    value = require_finite(name, value)
    if value < 0.0 or value > 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")
    return value


def require_open_unit_interval(name: str, value: float) -> float:
    value = require_finite(name, value)
    if value <= 0.0 or value >= 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value}")
    return value


def require_copies(value: int) -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise DomainError(f"number of copies must be a positive integer, got {value}")
    return int(value)
