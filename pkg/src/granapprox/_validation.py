"""Input validation helpers.

Membership degrees, relation values and probability parameters all live in
[0, 1].  Values within ``tol`` of a bound are clamped onto it; values further
outside are rejected, since silently clamping genuinely invalid data would
hide ingestion bugs.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

DEFAULT_TOL = 1e-9


def unit_value(x, *, tol: float = DEFAULT_TOL, name: str = "value") -> float:
    """Validate a single degree in [0, 1] and clamp boundary dust."""
    x = float(x)
    if not np.isfinite(x):
        raise ValidationError(f"{name} must be finite, got {x!r}")
    if x < -tol or x > 1.0 + tol:
        raise ValidationError(f"{name} must lie in [0, 1], got {x!r}")
    return min(1.0, max(0.0, x))


def unit_array(values, *, tol: float = DEFAULT_TOL, name: str = "values") -> np.ndarray:
    """Validate an array of degrees, returning a clamped float64 copy."""
    arr = np.asarray(values, dtype=float)
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    if arr.size and (arr.min() < -tol or arr.max() > 1.0 + tol):
        bad = arr[(arr < -tol) | (arr > 1.0 + tol)][0]
        raise ValidationError(f"{name} must lie in [0, 1], got {bad!r}")
    return np.clip(arr, 0.0, 1.0)


def square_relation(values, *, tol: float = DEFAULT_TOL, name: str = "relation") -> np.ndarray:
    """Validate an n-by-n matrix of degrees."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValidationError(f"{name} must contain at least one instance")
    return unit_array(arr, tol=tol, name=name)


def membership_vector(values, n: int | None = None, *, tol: float = DEFAULT_TOL,
                      name: str = "memberships") -> np.ndarray:
    """Validate a 1-D vector of degrees, optionally of a required length."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValidationError(f"{name} has length {arr.shape[0]}, expected {n}")
    return unit_array(arr, tol=tol, name=name)


def probability(p, *, tol: float = DEFAULT_TOL, name: str = "p") -> float:
    return unit_value(p, tol=tol, name=name)
