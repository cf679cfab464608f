"""Independent reference solvers used only for verification.

These are deliberately slow and simple, and share no code with the production
solvers: a dense two-phase simplex with Bland's rule, a KKT certificate
checker for the squared-loss projection problem, and an exhaustive enumerator
for crisp monotone relabeling.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from ._validation import probability
from .errors import ValidationError

LESS_EQUAL = "<="
GREATER_EQUAL = ">="
EQUAL = "=="


@dataclass
class LinearProgram:
    """min c'x subject to rows of (coeffs, sense, rhs), x >= 0 elementwise.

    Upper bounds on variables, when needed, are expressed as explicit rows.
    """

    objective: np.ndarray
    lhs: np.ndarray
    senses: list[str]
    rhs: np.ndarray

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.lhs = np.atleast_2d(np.asarray(self.lhs, dtype=float))
        self.rhs = np.asarray(self.rhs, dtype=float)
        if self.lhs.size == 0:
            self.lhs = self.lhs.reshape(0, self.objective.shape[0])
        m, n = self.lhs.shape
        if n != self.objective.shape[0]:
            raise ValidationError("objective length does not match constraint columns")
        if len(self.senses) != m or self.rhs.shape != (m,):
            raise ValidationError("senses and rhs must match the constraint rows")
        for s in self.senses:
            if s not in (LESS_EQUAL, GREATER_EQUAL, EQUAL):
                raise ValidationError(f"unknown sense {s!r}")
        if not (np.all(np.isfinite(self.objective)) and np.all(np.isfinite(self.lhs))
                and np.all(np.isfinite(self.rhs))):
            raise ValidationError("linear program coefficients must be finite")


@dataclass
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: float = float("nan")
    x: np.ndarray = field(default_factory=lambda: np.empty(0))


def _pivot(tableau, basis, row, col):
    tableau[row] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * tableau[row]
    basis[row] = col


def _run_simplex(tableau, basis, cost, tol, max_iter):
    """Minimize ``cost`` over the tableau rows with Bland's rule.

    The last tableau column is the rhs.  Returns "optimal" or "unbounded".
    """
    m = tableau.shape[0]
    for _ in range(max_iter):
        cb = cost[basis]
        reduced = cb @ tableau[:, :-1] - cost
        entering = -1
        for j in range(tableau.shape[1] - 1):
            if reduced[j] > tol:
                entering = j
                break
        if entering < 0:
            return "optimal"
        leaving, best, best_var = -1, np.inf, None
        for i in range(m):
            a = tableau[i, entering]
            if a > tol:
                ratio = tableau[i, -1] / a
                if ratio < best - tol or (abs(ratio - best) <= tol
                                          and (best_var is None or basis[i] < best_var)):
                    leaving, best, best_var = i, ratio, basis[i]
        if leaving < 0:
            return "unbounded"
        _pivot(tableau, basis, leaving, entering)
    raise RuntimeError("simplex iteration cap exceeded")


def simplex_solve(lp: LinearProgram, *, tol: float = 1e-9,
                  max_iter: int = 100_000) -> SimplexResult:
    """Textbook dense two-phase simplex.

    Phase one minimizes the sum of artificial variables to find a basic
    feasible point; phase two minimizes the true objective.  Bland's rule is
    used throughout, so the method cannot cycle.
    """
    lhs = lp.lhs.copy()
    rhs = lp.rhs.copy()
    senses = list(lp.senses)
    m, n = lhs.shape
    for i in range(m):
        if rhs[i] < 0:
            lhs[i] *= -1.0
            rhs[i] *= -1.0
            if senses[i] == LESS_EQUAL:
                senses[i] = GREATER_EQUAL
            elif senses[i] == GREATER_EQUAL:
                senses[i] = LESS_EQUAL

    slack_cols = [i for i, s in enumerate(senses) if s == LESS_EQUAL]
    surplus_cols = [i for i, s in enumerate(senses) if s == GREATER_EQUAL]
    artificial_rows = [i for i, s in enumerate(senses) if s != LESS_EQUAL]

    n_slack, n_surplus, n_art = len(slack_cols), len(surplus_cols), len(artificial_rows)
    width = n + n_slack + n_surplus + n_art
    tableau = np.zeros((m, width + 1))
    tableau[:, :n] = lhs
    tableau[:, -1] = rhs
    basis = [-1] * m

    for k, i in enumerate(slack_cols):
        tableau[i, n + k] = 1.0
        basis[i] = n + k
    for k, i in enumerate(surplus_cols):
        tableau[i, n + n_slack + k] = -1.0
    art_start = n + n_slack + n_surplus
    for k, i in enumerate(artificial_rows):
        tableau[i, art_start + k] = 1.0
        basis[i] = art_start + k

    if n_art:
        phase1 = np.zeros(width)
        phase1[art_start:] = 1.0
        status = _run_simplex(tableau, basis, phase1, tol, max_iter)
        if status != "optimal":
            raise RuntimeError("phase one cannot be unbounded")
        value = phase1[basis] @ tableau[:, -1]
        if value > np.sqrt(tol):
            return SimplexResult("infeasible")
        # Drive leftover artificial variables out of the basis.
        for i in range(m):
            if basis[i] >= art_start:
                pivot_col = -1
                for j in range(art_start):
                    if abs(tableau[i, j]) > tol:
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    _pivot(tableau, basis, i, pivot_col)

    keep_rows = [i for i in range(m) if basis[i] < art_start]
    tableau = tableau[keep_rows][:, list(range(art_start)) + [width]]
    basis = [basis[i] for i in keep_rows]

    cost = np.zeros(art_start)
    cost[:n] = lp.objective
    status = _run_simplex(tableau, basis, cost, tol, max_iter)
    if status == "unbounded":
        return SimplexResult("unbounded")
    x = np.zeros(art_start)
    for i, b in enumerate(basis):
        x[b] = tableau[i, -1]
    x = x[:n]
    return SimplexResult("optimal", float(lp.objective @ x), x)


@dataclass
class KKTReport:
    feasibility_residual: float
    stationarity_residual: float
    complementarity_residual: float
    multipliers: np.ndarray
    active: np.ndarray


def kkt_check(constraint_lhs, constraint_rhs, target, candidate, *,
              active_tol: float = 1e-6) -> KKTReport:
    """Certify a candidate for min ||x - target||^2 s.t. A x <= b.

    Nonnegative multipliers for the active constraints are reconstructed by
    least squares; the report carries stationarity and complementarity
    residuals and never raises.
    """
    lhs = np.atleast_2d(np.asarray(constraint_lhs, dtype=float))
    rhs = np.asarray(constraint_rhs, dtype=float)
    target = np.asarray(target, dtype=float)
    x = np.asarray(candidate, dtype=float)
    slack = lhs @ x - rhs if lhs.size else np.empty(0)
    feasibility = float(np.max(slack, initial=0.0))

    grad = 2.0 * (x - target)
    active = np.where(np.abs(slack) <= active_tol)[0] if lhs.size else np.empty(0, dtype=int)
    if active.size:
        basis = lhs[active].T  # columns are active constraint normals
        lam, _ = nnls(basis, -grad)
        stationarity = float(np.max(np.abs(basis @ lam + grad)))
        complementarity = float(np.max(np.abs(lam * slack[active]), initial=0.0))
        multipliers = lam
    else:
        stationarity = float(np.max(np.abs(grad), initial=0.0))
        complementarity = 0.0
        multipliers = np.empty(0)
    return KKTReport(feasibility, stationarity, complementarity, multipliers, active)


def brute_force_crisp(dominance, labels, p, *, max_n: int = 20) -> tuple[np.ndarray, float]:
    """Exhaustive minimizer of the asymmetric loss over monotone 0/1 labelings.

    A labeling is monotone when dominance(u, v) = 1 implies label(u) >= label(v).
    Returns the first optimal labeling in lexicographic order and its cost.
    """
    dom = np.asarray(dominance)
    labels = np.asarray(labels)
    p = probability(p)
    n = labels.shape[0]
    if n > max_n:
        raise ValidationError(f"brute force limited to n <= {max_n}, got {n}")
    if dom.shape != (n, n):
        raise ValidationError("dominance matrix does not match the labels")
    pairs = [(u, v) for u in range(n) for v in range(n)
             if u != v and dom[u, v]]
    best_cost, best = np.inf, None
    for cand in itertools.product((0, 1), repeat=n):
        if any(cand[u] < cand[v] for u, v in pairs):
            continue
        cost = 0.0
        for obs, est in zip(labels, cand):
            diff = obs - est
            cost += p * diff if diff > 0 else (p - 1.0) * diff
        if cost < best_cost - 1e-15:
            best_cost, best = cost, cand
    return np.array(best, dtype=int), float(best_cost)
