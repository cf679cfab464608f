"""Granular approximation solvers.

Given a T-preorder relation and observed membership degrees, these solvers
return the granularly representable fuzzy set minimizing a chosen loss:

* quantile loss, solved combinatorially through the min-cost-flow dual
  (additive network for the nilpotent family, multiplicative for the strict
  family), with the primal recovered from residual shortest paths;
* squared loss, solved by cyclic Dykstra projection onto the half-space
  constraints, certified afterwards against KKT conditions by the oracle
  tests.

Probability parameters exactly 0 or 1 short-circuit to the closed-form rough
approximations, which are the corresponding optimizers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._validation import DEFAULT_TOL, membership_vector, probability
from .connectives import LUKASIEWICZ, PRODUCT, ResidualTriplet
from .errors import IterationLimitError, RelationError, SolverError, ValidationError
from .flow import (
    BipartiteFlowNetwork,
    GeneralizedSSP,
    ResidualNetwork,
    SuccessiveShortestPaths,
    cheapest_delivery_costs,
    fix_middle_edges,
)
from .relation import inverse as relation_inverse
from .relation import require_t_preorder
from .rough import lower_approximation, upper_approximation


@dataclass(frozen=True)
class GranularApproximation:
    """A granularly representable repair of observed membership degrees."""

    memberships: np.ndarray
    phi_values: np.ndarray
    objective: float
    feasibility_residual: float
    diagnostics: dict = field(default_factory=dict)


def _solver_family(triplet: ResidualTriplet) -> str:
    if triplet.family == LUKASIEWICZ:
        return "additive"
    if triplet.family == PRODUCT:
        return "multiplicative"
    raise ValidationError(
        f"granular approximation supports the nilpotent and strict families, "
        f"not {triplet.family!r}")


def _prepare(relation, observed, triplet, tol, validate, transitivity_tol=None):
    _solver_family(triplet)
    if validate:
        rel = require_t_preorder(relation, triplet, tol=tol,
                                 transitivity_tol=transitivity_tol)
    else:
        rel = np.asarray(relation, dtype=float)
    a = membership_vector(observed, rel.shape[0], tol=tol)
    bij = triplet.bijection
    r_phi = np.asarray(bij.forward(rel), dtype=float)
    a_phi = np.asarray(bij.forward(a), dtype=float)
    return rel, a, r_phi, a_phi


def _phi_feasibility_residual(family: str, r_phi: np.ndarray, alpha: np.ndarray) -> float:
    if family == "additive":
        reached = np.maximum(r_phi + alpha[None, :] - 1.0, 0.0)
    else:
        reached = r_phi * alpha[None, :]
    return float(np.max(reached - alpha[:, None]))


def quantile_loss_total(observed_phi, estimate_phi, p: float) -> float:
    """Sum of the asymmetric loss: positive residuals weigh p, negative 1 - p."""
    r = np.asarray(observed_phi, dtype=float) - np.asarray(estimate_phi, dtype=float)
    return float(np.sum(np.where(r > 0, p * r, (p - 1.0) * r)))


def _closed_form(rel, a, triplet, r_phi, a_phi, p, family) -> GranularApproximation:
    if p == 0.0:
        memberships = lower_approximation(rel, triplet, a)
        mode = "closed-form-lower"
    else:
        memberships = upper_approximation(rel, triplet, a)
        mode = "closed-form-upper"
    alpha = np.asarray(triplet.bijection.forward(memberships), dtype=float)
    return GranularApproximation(
        memberships=memberships,
        phi_values=alpha,
        objective=quantile_loss_total(a_phi, alpha, p),
        feasibility_residual=_phi_feasibility_residual(family, r_phi, alpha),
        diagnostics={"mode": mode, "p": p, "iterations": 0},
    )


def _build_engine(family, r_phi, a_phi, demand, exact, tol):
    rows = r_phi.tolist()
    costs = a_phi.tolist()
    if family == "additive":
        net = BipartiteFlowNetwork.additive(rows, costs, demand, exact=exact, tol=tol)
        return SuccessiveShortestPaths(net)
    net = BipartiteFlowNetwork.multiplicative(rows, costs, demand, exact=exact, tol=tol)
    return GeneralizedSSP(net)


def _extract_alpha(engine) -> tuple[np.ndarray, dict]:
    fixed = fix_middle_edges(engine.solution())
    residual = ResidualNetwork.from_solution(fixed)
    costs = cheapest_delivery_costs(residual)
    values = [float(c) for c in costs]
    if any(math.isinf(v) for v in values):
        raise SolverError("a destination became unreachable during extraction")
    alpha = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
    info = {"iterations": engine.iterations, "flow_cost": float(fixed.cost)}
    return alpha, info


def _flow_result(rel, a, triplet, r_phi, a_phi, p, family, engine) -> GranularApproximation:
    alpha, info = _extract_alpha(engine)
    memberships = np.asarray(triplet.bijection.inverse(alpha), dtype=float)
    diagnostics = {"mode": f"flow-{family}", "p": p, "exact": engine.network.exact}
    diagnostics.update(info)
    return GranularApproximation(
        memberships=memberships,
        phi_values=alpha,
        objective=quantile_loss_total(a_phi, alpha, p),
        feasibility_residual=_phi_feasibility_residual(family, r_phi, alpha),
        diagnostics=diagnostics,
    )


def granular_approx_quantile(relation, observed, triplet: ResidualTriplet, p, *,
                             tol: float = DEFAULT_TOL, exact: bool = False,
                             validate: bool = True,
                             transitivity_tol: float | None = None) -> GranularApproximation:
    """Quantile-loss granular approximation through the flow dual.

    Minimizes the asymmetric loss of the phi-space values subject to the
    linear granularity constraints.  The relation must be a T-preorder for
    the triplet; violations are rejected with the offending triples.
    """
    p = probability(p, tol=tol)
    rel, a, r_phi, a_phi = _prepare(relation, observed, triplet, tol, validate,
                                    transitivity_tol)
    family = _solver_family(triplet)
    if p in (0.0, 1.0):
        return _closed_form(rel, a, triplet, r_phi, a_phi, p, family)
    engine = _build_engine(family, r_phi, a_phi, p, exact, tol)
    engine.run_to(engine.network.demand)
    return _flow_result(rel, a, triplet, r_phi, a_phi, p, family, engine)


def quantile_sweep(relation, observed, triplet: ResidualTriplet, ps, *,
                   tol: float = DEFAULT_TOL, exact: bool = False,
                   validate: bool = True,
                   transitivity_tol: float | None = None) -> list[GranularApproximation]:
    """Solve for several probability parameters by growing one shared flow.

    ``ps`` must be non-decreasing.  The incremental procedure makes the
    returned approximations pointwise non-decreasing in p.
    """
    ps = [probability(p, tol=tol) for p in ps]
    if any(q < p for p, q in zip(ps, ps[1:])):
        raise ValidationError("probability parameters must be non-decreasing")
    rel, a, r_phi, a_phi = _prepare(relation, observed, triplet, tol, validate,
                                    transitivity_tol)
    family = _solver_family(triplet)
    engine = None
    out = []
    for p in ps:
        if p in (0.0, 1.0):
            out.append(_closed_form(rel, a, triplet, r_phi, a_phi, p, family))
            continue
        if engine is None:
            engine = _build_engine(family, r_phi, a_phi, p, exact, tol)
        engine.run_to(Fraction(p) if exact else p)
        out.append(_flow_result(rel, a, triplet, r_phi, a_phi, p, family, engine))
    return out


def quantile_band(relation, observed, triplet: ResidualTriplet, p, eps_band: float, *,
                  tol: float = DEFAULT_TOL, exact: bool = False, validate: bool = True,
                  transitivity_tol: float | None = None,
                  ) -> tuple[GranularApproximation, GranularApproximation]:
    """Bracket a possibly non-unique optimum by solving at p - eps and p + eps.

    Returns (lower, upper); the shared incremental flow guarantees
    lower <= upper pointwise.
    """
    p = probability(p, tol=tol)
    eps_band = float(eps_band)
    if not 0.0 < p < 1.0:
        raise ValidationError("banding needs 0 < p < 1")
    if eps_band <= 0.0 or p - eps_band <= 0.0 or p + eps_band >= 1.0:
        raise ValidationError("eps_band must keep p - eps and p + eps inside (0, 1)")
    lower, upper = quantile_sweep(relation, observed, triplet, [p - eps_band, p + eps_band],
                                  tol=tol, exact=exact, validate=validate,
                                  transitivity_tol=transitivity_tol)
    return lower, upper


def complement_solve(relation, observed, triplet: ResidualTriplet, p, *,
                     tol: float = DEFAULT_TOL, exact: bool = False,
                     validate: bool = True,
                     transitivity_tol: float | None = None) -> GranularApproximation:
    """Solve the quantile problem through its complement dual.

    Runs the loss-(1 - p) problem over the inverted relation and the
    complemented observations, then maps the result back through the negator.
    Requires the nilpotent family, whose negator is involutive; the returned
    objective equals the direct solve's objective.
    """
    if triplet.family != LUKASIEWICZ:
        raise ValidationError("the complement route needs an involutive negator "
                              "(nilpotent family)")
    p = probability(p, tol=tol)
    rel, a, r_phi, a_phi = _prepare(relation, observed, triplet, tol, validate,
                                    transitivity_tol)
    co_a = np.asarray(triplet.negator(a), dtype=float)
    mirrored = granular_approx_quantile(
        relation_inverse(rel), co_a, triplet, 1.0 - p,
        tol=tol, exact=exact, validate=False)
    alpha = np.clip(1.0 - mirrored.phi_values, 0.0, 1.0)
    memberships = np.asarray(triplet.bijection.inverse(alpha), dtype=float)
    diagnostics = dict(mirrored.diagnostics)
    diagnostics["mode"] = "complement:" + str(diagnostics.get("mode"))
    diagnostics["p"] = p
    return GranularApproximation(
        memberships=memberships,
        phi_values=alpha,
        objective=quantile_loss_total(a_phi, alpha, p),
        feasibility_residual=_phi_feasibility_residual("additive", r_phi, alpha),
        diagnostics=diagnostics,
    )


def monotone_approximation_crisp(dominance, labels, p, *, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Monotone 0/1 relabeling of minimal asymmetric loss over a crisp preorder.

    The crisp preorder embeds as a degree-valued relation and the quantile
    solver applies; crisp inputs keep the optimum integral, so the result is
    rounded back to {0, 1}.
    """
    dom = np.asarray(dominance)
    labels = np.asarray(labels)
    if dom.ndim != 2 or dom.shape[0] != dom.shape[1]:
        raise ValidationError("dominance must be a square matrix")
    values = np.unique(dom)
    if not np.all(np.isin(values, (0, 1))):
        raise ValidationError("dominance must be crisp (entries 0 or 1)")
    if not np.all(np.isin(np.unique(labels), (0, 1))):
        raise ValidationError("labels must be crisp (entries 0 or 1)")
    bools = dom.astype(bool)
    if not np.all(np.diag(bools)):
        raise RelationError("crisp dominance must be reflexive")
    broken = (bools @ bools) & ~bools
    if broken.any():
        pairs = [(int(u), int(w)) for u, w in np.argwhere(broken)]
        raise RelationError(f"crisp dominance is not transitive at pairs {pairs[:5]}",
                            violations=pairs)
    triplet = ResidualTriplet.lukasiewicz()
    sol = granular_approx_quantile(bools.astype(float), labels.astype(float), triplet,
                                   probability(p, tol=tol), tol=tol, validate=False)
    rounded = np.rint(sol.memberships)
    if np.max(np.abs(rounded - sol.memberships), initial=0.0) > 1e-6:
        raise SolverError("expected an integral optimum for crisp inputs")
    return rounded.astype(int)


# ---------------------------------------------------------------------------
# Squared loss via cyclic Dykstra projection.
# ---------------------------------------------------------------------------


def _constraint_batches(family, r_phi, tol, order_seed):
    n = r_phi.shape[0]
    pairs = [(u, v) for u in range(n) for v in range(n)
             if u != v and r_phi[u, v] > tol]
    if order_seed is not None:
        rng = np.random.default_rng(order_seed)
        rng.shuffle(pairs)
    batches = []
    for u, v in pairs:
        placed = False
        for used, members in batches:
            if u not in used and v not in used:
                used.update((u, v))
                members.append((u, v))
                placed = True
                break
        if not placed:
            batches.append(({u, v}, [(u, v)]))
    out = []
    for _, members in batches:
        u_idx = np.array([u for u, _ in members], dtype=int)
        v_idx = np.array([v for _, v in members], dtype=int)
        if family == "additive":
            coef = np.ones(len(members))
            rhs = np.array([1.0 - r_phi[u, v] for u, v in members])
        else:
            coef = np.array([r_phi[u, v] for u, v in members])
            rhs = np.zeros(len(members))
        inv_norm = 1.0 / (1.0 + coef * coef)
        out.append({"u": u_idx, "v": v_idx, "coef": coef, "rhs": rhs,
                    "inv_norm": inv_norm, "mu": np.zeros(len(members))})
    return out


def _dykstra_project(a_phi, batches, family, r_phi, *, update_tol=1e-10,
                     residual_tol=1e-9, max_sweeps=200_000):
    x = a_phi.astype(float).copy()
    sweeps = 0
    worst = math.inf
    while sweeps < max_sweeps:
        sweeps += 1
        worst = 0.0
        for batch in batches:
            s = batch["coef"] * x[batch["v"]] - x[batch["u"]] - batch["rhs"]
            theta = np.maximum(0.0, s * batch["inv_norm"] + batch["mu"])
            delta = batch["mu"] - theta
            if delta.size:
                step = float(np.max(np.abs(delta)))
                if step > worst:
                    worst = step
            x[batch["v"]] += delta * batch["coef"]
            x[batch["u"]] -= delta
            batch["mu"] = theta
        if worst < update_tol:
            if _phi_feasibility_residual(family, r_phi, np.clip(x, 0.0, 1.0)) <= residual_tol:
                break
    else:
        raise IterationLimitError(
            f"projection failed to converge within {max_sweeps} sweeps",
            residual=worst,
        )
    return np.clip(x, 0.0, 1.0), sweeps


def granular_approx_mse(relation, observed, triplet: ResidualTriplet, *,
                        tol: float = DEFAULT_TOL, validate: bool = True,
                        order_seed=None, max_sweeps: int = 200_000,
                        transitivity_tol: float | None = None) -> GranularApproximation:
    """Squared-loss granular approximation: projection onto the constraint set.

    The unique minimizer of the squared phi-space loss is the Euclidean
    projection of the observed phi values onto the polyhedron of granularity
    constraints; cyclic Dykstra projection converges to it.  ``order_seed``
    shuffles the constraint ordering, which must not change the result.
    """
    rel, a, r_phi, a_phi = _prepare(relation, observed, triplet, tol, validate,
                                    transitivity_tol)
    family = _solver_family(triplet)
    batches = _constraint_batches(family, r_phi, tol, order_seed)
    alpha, sweeps = _dykstra_project(a_phi, batches, family, r_phi, max_sweeps=max_sweeps)
    memberships = np.asarray(triplet.bijection.inverse(alpha), dtype=float)
    return GranularApproximation(
        memberships=memberships,
        phi_values=alpha,
        objective=float(np.sum((alpha - a_phi) ** 2)),
        feasibility_residual=_phi_feasibility_residual(family, r_phi, alpha),
        diagnostics={"mode": f"projection-{family}", "sweeps": sweeps,
                     "order_seed": order_seed},
    )
