"""Fuzzy granules, granular representability and rough approximations.

A granule anchored at instance u with height ``lam`` is the fuzzy set
``v -> T(R(u, v), lam)``.  A fuzzy set is granularly representable when it
equals the union of its own granules, which holds exactly when
``T(R(v, u), A(u)) <= A(v)`` for every pair.  The lower and upper rough
approximations are the largest granularly representable set contained in A
and the smallest one containing it.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from ._validation import DEFAULT_TOL, membership_vector, square_relation, unit_value
from .connectives import ResidualTriplet
from .errors import ParseError, ValidationError


def _check_pair(relation, memberships, tol):
    rel = square_relation(relation, tol=tol)
    a = membership_vector(memberships, rel.shape[0], tol=tol)
    return rel, a


def granule(relation, triplet: ResidualTriplet, u: int, height, *,
            tol: float = DEFAULT_TOL) -> np.ndarray:
    """Fuzzy granule anchored at instance ``u``: v -> T(R(u, v), height)."""
    rel = square_relation(relation, tol=tol)
    if not 0 <= u < rel.shape[0]:
        raise ValidationError(f"instance index {u} out of range for n={rel.shape[0]}")
    lam = unit_value(height, tol=tol, name="height")
    return np.asarray(triplet.tnorm(rel[u, :], lam), dtype=float)


def lower_approximation(relation, triplet: ResidualTriplet, memberships, *,
                        tol: float = DEFAULT_TOL) -> np.ndarray:
    """result(u) = min over v of I(R(v, u), A(v)); contained in A pointwise."""
    rel, a = _check_pair(relation, memberships, tol)
    implied = triplet.implicator(rel, a[:, None])
    return implied.min(axis=0)


def upper_approximation(relation, triplet: ResidualTriplet, memberships, *,
                        tol: float = DEFAULT_TOL) -> np.ndarray:
    """result(u) = max over v of T(R(u, v), A(v)); contains A pointwise."""
    rel, a = _check_pair(relation, memberships, tol)
    combined = triplet.tnorm(rel, a[None, :])
    return combined.max(axis=1)


def representability_violations(relation, triplet: ResidualTriplet, memberships, *,
                                tol: float = DEFAULT_TOL) -> list[tuple[int, int, float]]:
    """Pairs (v, u) with T(R(v, u), A(u)) > A(v) + tol, worst first.

    The reported slack is T(R(v, u), A(u)) - A(v).
    """
    rel, a = _check_pair(relation, memberships, tol)
    reached = triplet.tnorm(rel, a[None, :])
    slack = reached - a[:, None]
    where = np.argwhere(slack > tol)
    out = [(int(v), int(u), float(slack[v, u])) for v, u in where]
    out.sort(key=lambda t: (-t[2], t[:2]))
    return out


def is_granularly_representable(relation, triplet: ResidualTriplet, memberships, *,
                                tol: float = DEFAULT_TOL) -> bool:
    return not representability_violations(relation, triplet, memberships, tol=tol)


def alpha_cut(memberships, alpha: float, *, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Indices u with A(u) >= alpha, for alpha in (0, 1]."""
    a = membership_vector(memberships, tol=tol)
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise ValidationError(f"alpha must lie in (0, 1], got {alpha!r}")
    return np.where(a >= alpha)[0]


# ---------------------------------------------------------------------------
# Serialization of membership vectors.
# ---------------------------------------------------------------------------


def memberships_to_csv(memberships) -> str:
    a = membership_vector(memberships)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for x in a:
        writer.writerow([repr(float(x))])
    return buf.getvalue()


def memberships_from_csv(text: str, *, tol: float = DEFAULT_TOL) -> np.ndarray:
    values = []
    try:
        for record in csv.reader(io.StringIO(text)):
            if not record:
                continue
            if len(record) != 1:
                raise ParseError("membership CSV must hold a single column")
            values.append(float(record[0]))
    except ValueError as exc:
        raise ParseError(f"malformed membership CSV: {exc}") from exc
    if not values:
        raise ParseError("membership CSV is empty")
    return membership_vector(np.array(values), tol=tol)


def memberships_to_json(memberships) -> str:
    a = membership_vector(memberships)
    return json.dumps([float(x) for x in a])


def memberships_from_json(text: str, *, tol: float = DEFAULT_TOL) -> np.ndarray:
    try:
        values = np.asarray(json.loads(text), dtype=float)
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed membership JSON: {exc}") from exc
    return membership_vector(values, tol=tol)
