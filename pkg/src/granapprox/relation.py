"""Fuzzy relations: construction, property checks, transforms and serialization.

A fuzzy relation over n instances is an n-by-n matrix of degrees.  A reflexive
and T-transitive relation is a T-preorder; adding symmetry gives a
T-equivalence.  Relations are plain ``numpy`` arrays; the functions here
validate and never repair: a failed property check reports the violating
triples and leaves the data untouched.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import DEFAULT_TOL, square_relation
from .connectives import Bijection, ResidualTriplet
from .errors import ParseError, RelationError, ValidationError


@dataclass(frozen=True)
class Dataset:
    """Attribute table with a decision column and optional attribute ranges."""

    attributes: np.ndarray
    decision: np.ndarray
    ranges: np.ndarray | None = None

    def __post_init__(self):
        attrs = np.asarray(self.attributes, dtype=float)
        if attrs.ndim != 2:
            raise ValidationError("attributes must be a 2-D table")
        object.__setattr__(self, "attributes", attrs)
        decision = np.asarray(self.decision, dtype=float)
        if decision.shape != (attrs.shape[0],):
            raise ValidationError("decision length must match the attribute rows")
        object.__setattr__(self, "decision", decision)
        if self.ranges is not None:
            ranges = np.asarray(self.ranges, dtype=float)
            if ranges.shape != (attrs.shape[1],):
                raise ValidationError("ranges length must match the attribute columns")
            if np.any(ranges <= 0):
                raise ValidationError("attribute ranges must be strictly positive")
            object.__setattr__(self, "ranges", ranges)


def triangular_similarity(attributes, ranges=None, *, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Triangular similarity relation from numeric attribute data.

    Per attribute q, similarity is max(1 - |f(u,q) - f(v,q)| / range(q), 0) and
    the overall relation takes the minimum over attributes.  Ranges come from
    configuration when supplied, otherwise from the per-attribute max - min of
    the given data.  The result is reflexive, symmetric and Lukasiewicz
    transitive.
    """
    attrs = np.asarray(attributes, dtype=float)
    if attrs.ndim != 2 or attrs.shape[0] == 0 or attrs.shape[1] == 0:
        raise ValidationError("attributes must be a non-empty 2-D table")
    if not np.all(np.isfinite(attrs)):
        raise ValidationError("attributes must be finite")
    n, m = attrs.shape
    if ranges is None:
        ranges = attrs.max(axis=0) - attrs.min(axis=0)
    ranges = np.asarray(ranges, dtype=float)
    if ranges.shape != (m,):
        raise ValidationError(f"expected {m} attribute ranges, got shape {ranges.shape}")
    for q, r in enumerate(ranges):
        if not np.isfinite(r) or r <= 0:
            raise ValidationError(f"attribute {q} has non-positive range {r!r}")
    diffs = np.abs(attrs[:, None, :] - attrs[None, :, :]) / ranges[None, None, :]
    rel = np.maximum(1.0 - diffs, 0.0).min(axis=2)
    np.fill_diagonal(rel, 1.0)
    return rel


def transitivity_violations(relation, triplet: ResidualTriplet, *,
                            tol: float = DEFAULT_TOL) -> list[tuple[int, int, int, float]]:
    """Exhaustively scan for triples (u, v, w) with T(R(u,v), R(v,w)) > R(u,w) + tol.

    Returns (u, v, w, excess) tuples sorted by decreasing excess; an empty list
    means the relation is T-transitive.
    """
    rel = square_relation(relation, tol=tol)
    chained = triplet.tnorm(rel[:, :, None], rel[None, :, :])
    excess = chained - rel[:, None, :]
    where = np.argwhere(excess > tol)
    out = [(int(u), int(v), int(w), float(excess[u, v, w])) for u, v, w in where]
    out.sort(key=lambda t: (-t[3], t[:3]))
    return out


def is_t_transitive(relation, triplet: ResidualTriplet, *, tol: float = DEFAULT_TOL) -> bool:
    return not transitivity_violations(relation, triplet, tol=tol)


def is_reflexive(relation, *, tol: float = DEFAULT_TOL) -> bool:
    rel = square_relation(relation, tol=tol)
    return bool(np.all(np.abs(np.diag(rel) - 1.0) <= tol))


def is_symmetric(relation, *, tol: float = DEFAULT_TOL) -> bool:
    rel = square_relation(relation, tol=tol)
    return bool(np.all(np.abs(rel - rel.T) <= tol))


def require_t_preorder(relation, triplet: ResidualTriplet, *, tol: float = DEFAULT_TOL,
                       transitivity_tol: float | None = None) -> np.ndarray:
    """Validate reflexivity and T-transitivity, returning a cleaned copy.

    Raises :class:`RelationError` with the violating instances or triples.
    ``transitivity_tol`` loosens only the transitivity scan, which is needed
    when ingesting relation tables published at limited decimal precision.
    """
    rel = square_relation(relation, tol=tol)
    diag = np.diag(rel)
    bad = np.where(np.abs(diag - 1.0) > tol)[0]
    if bad.size:
        raise RelationError(
            f"relation is not reflexive at instances {bad.tolist()}",
            violations=[(int(u), int(u), float(diag[u])) for u in bad],
        )
    np.fill_diagonal(rel, 1.0)
    triples = transitivity_violations(rel, triplet,
                                      tol=tol if transitivity_tol is None else transitivity_tol)
    if triples:
        raise RelationError(
            f"relation is not T-transitive; worst triple {triples[0][:3]} "
            f"with excess {triples[0][3]:.3g}",
            violations=triples,
        )
    return rel


def inverse(relation) -> np.ndarray:
    """Transpose of the relation.  Preserves reflexivity and T-transitivity."""
    rel = np.asarray(relation, dtype=float)
    return rel.T.copy()


def phi_image(relation, bijection: Bijection) -> np.ndarray:
    """Elementwise image of the relation under a unit-interval bijection."""
    rel = square_relation(relation)
    return np.asarray(bijection.forward(rel), dtype=float)


# ---------------------------------------------------------------------------
# Serialization: relations as CSV (n rows of n values) or JSON (row-major
# values plus an "n" field); membership vectors as a single CSV column or a
# JSON array.
# ---------------------------------------------------------------------------


def relation_to_csv(relation) -> str:
    rel = square_relation(relation)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rel:
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def relation_from_csv(text: str, *, tol: float = DEFAULT_TOL) -> np.ndarray:
    rows = []
    try:
        for record in csv.reader(io.StringIO(text)):
            if not record:
                continue
            rows.append([float(cell) for cell in record])
    except ValueError as exc:
        raise ParseError(f"malformed relation CSV: {exc}") from exc
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ParseError("relation CSV must contain n rows of n values")
    return square_relation(np.array(rows, dtype=float), tol=tol)


def relation_to_json(relation) -> str:
    rel = square_relation(relation)
    payload = {"n": int(rel.shape[0]), "values": [float(x) for x in rel.ravel()]}
    return json.dumps(payload, sort_keys=True)


def relation_from_json(text: str, *, tol: float = DEFAULT_TOL) -> np.ndarray:
    try:
        payload = json.loads(text)
        n = int(payload["n"])
        values = np.asarray(payload["values"], dtype=float)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed relation JSON: {exc}") from exc
    if values.shape != (n * n,):
        raise ParseError(f"expected {n * n} values for n={n}, got {values.shape[0]}")
    return square_relation(values.reshape(n, n), tol=tol)


def load_relation(path, *, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Load a relation from a ``.json`` or CSV file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return relation_from_json(text, tol=tol)
    return relation_from_csv(text, tol=tol)
