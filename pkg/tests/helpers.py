"""Shared test data and generators: golden tables, random preorders, LP builders."""

import numpy as np

from granapprox.oracle import LinearProgram

# Published 3-decimal golden data: the 4-instance classification example and
# the 5-instance regression example.

IRIS_RELATION = np.array([
    [1.000, 0.917, 0.525, 0.208],
    [0.917, 1.000, 0.492, 0.292],
    [0.525, 0.492, 1.000, 0.667],
    [0.208, 0.292, 0.667, 1.000],
])
IRIS_LABELS = np.array([0.0, 0.0, 1.0, 1.0])
IRIS_QUANTILE_TABLE = {
    0.00: (0.000, 0.000, 0.475, 0.708),
    0.25: (0.000, 0.000, 0.475, 0.708),
    0.50: (0.326, 0.292, 0.800, 1.000),
    0.75: (0.525, 0.492, 1.000, 1.000),
    1.00: (0.525, 0.492, 1.000, 1.000),
}
IRIS_MSE = (0.221, 0.187, 0.696, 0.896)

ESTATE_RELATION = np.array([
    [1.000, 0.600, 0.569, 0.500, 0.600],
    [0.600, 1.000, 0.687, 0.696, 0.454],
    [0.569, 0.687, 1.000, 0.591, 0.635],
    [0.500, 0.696, 0.591, 1.000, 0.600],
    [0.600, 0.454, 0.635, 0.600, 1.000],
])
ESTATE_DECISIONS = np.array([0.180, 0.540, 0.158, 0.938, 0.195])
ESTATE_QUANTILE_TABLE = {
    0.00: (0.180, 0.472, 0.158, 0.567, 0.195),
    0.25: (0.180, 0.472, 0.158, 0.567, 0.195),
    0.50: (0.180, 0.540, 0.226, 0.594, 0.195),
    0.75: (0.343, 0.540, 0.435, 0.843, 0.444),
    1.00: (0.438, 0.634, 0.529, 0.938, 0.538),
}
ESTATE_MSE = (0.195, 0.540, 0.286, 0.695, 0.295)

GOLDEN_TOL = 0.005
TABLE_TRANSITIVITY_TOL = 0.005


def tl_preorder(rng, n, symmetric=False, high_zero_chance=0.0):
    """Random Lukasiewicz preorder via min-plus closure of the complement."""
    M = rng.uniform(0.0, 1.0, (n, n))
    if high_zero_chance:
        M[rng.uniform(size=(n, n)) < high_zero_chance] = 1.0
    np.fill_diagonal(M, 0.0)
    if symmetric:
        M = np.minimum(M, M.T)
    for k in range(n):
        M = np.minimum(M, M[:, [k]] + M[[k], :])
    return 1.0 - M


def tp_preorder(rng, n, low=0.05, symmetric=False):
    """Random product preorder via min-plus closure of the negative log."""
    W = -np.log(rng.uniform(low, 1.0, (n, n)))
    np.fill_diagonal(W, 0.0)
    if symmetric:
        W = np.minimum(W, W.T)
    for k in range(n):
        W = np.minimum(W, W[:, [k]] + W[[k], :])
    return np.exp(-W)


def crisp_preorder(rng, n, density=0.3):
    B = rng.uniform(size=(n, n)) < density
    np.fill_diagonal(B, True)
    for k in range(n):
        B |= np.outer(B[:, k], B[k, :])
    return B.astype(int)


def random_memberships(rng, n):
    return rng.uniform(0.0, 1.0, n)


def quantile_lp(relation_phi, memberships_phi, p, family) -> LinearProgram:
    """The quantile problem as a plain LP for the simplex oracle.

    Variables are [alpha (n), x (n), y (n)]; all pairwise granularity
    constraints are included regardless of solver-side pruning.
    """
    R = np.asarray(relation_phi, dtype=float)
    A = np.asarray(memberships_phi, dtype=float)
    n = A.shape[0]
    c = np.concatenate([np.zeros(n), p * np.ones(n), (1.0 - p) * np.ones(n)])
    lhs, senses, rhs = [], [], []
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            row = np.zeros(3 * n)
            if family == "lukasiewicz":
                row[v], row[u] = 1.0, -1.0
                b = 1.0 - R[u, v]
            else:
                row[v], row[u] = R[u, v], -1.0
                b = 0.0
            lhs.append(row)
            senses.append("<=")
            rhs.append(b)
    for u in range(n):
        row = np.zeros(3 * n)
        row[u], row[n + u], row[2 * n + u] = 1.0, 1.0, -1.0
        lhs.append(row)
        senses.append("==")
        rhs.append(A[u])
        box = np.zeros(3 * n)
        box[u] = 1.0
        lhs.append(box)
        senses.append("<=")
        rhs.append(1.0)
    return LinearProgram(c, np.array(lhs), senses, np.array(rhs))


def granularity_constraints(relation_phi, family):
    """All pairwise constraints as (lhs, rhs) rows over alpha for KKT checks."""
    R = np.asarray(relation_phi, dtype=float)
    n = R.shape[0]
    lhs, rhs = [], []
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            row = np.zeros(n)
            if family == "lukasiewicz":
                row[v], row[u] = 1.0, -1.0
                lhs.append(row)
                rhs.append(1.0 - R[u, v])
            else:
                row[v], row[u] = R[u, v], -1.0
                lhs.append(row)
                rhs.append(0.0)
    return np.array(lhs), np.array(rhs)
