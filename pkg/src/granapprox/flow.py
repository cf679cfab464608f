"""Bipartite network-flow engines for the granular approximation duals.

The dual of the quantile problem is a minimum-cost flow on a bipartite
network: a supply node 0, one intermediate node per instance (e_u) and one
destination node per instance (f_v).  Supply edges (0, e_u) carry cost equal
to the observed degree of u and capacity one.  Cross edges (e_u, f_v) carry,
in additive mode, cost M(u, v) = 1 - r(u, v) with unbounded capacity, and in
multiplicative mode a gain r(u, v) in (0, 1] with no cost: t units leaving
e_u arrive at f_v as r(u, v) * t.  Every destination demands the probability
parameter.

Node ids: 0 is the supply, 1 + u is e_u and 1 + n + v is f_v.

Two engines are provided: successive shortest paths for the additive mode and
a generalized variant for the multiplicative mode whose shortest paths
minimize (supply edge cost) / (product of gains along the path).  Shortest
paths use Bellman-Ford, since residual costs are negative in additive mode;
relaxation follows a fixed edge order with strict-only updates, so equal-cost
ties resolve deterministically and predecessor chains stay acyclic.
Inputs may be floats or ``fractions.Fraction`` values; with Fractions every
step of the computation is exact.

A solver instance owns its residual network mutably during a solve; distinct
instances over distinct networks may run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ._validation import DEFAULT_TOL
from .errors import (
    IterationLimitError,
    NegativeCycleError,
    SolverError,
    ValidationError,
)

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"

#: Flow amounts below this are treated as zero when building residual edges
#: (float mode only; exact mode compares against literal zero).
ZERO_FLOW = 1e-12

#: Minimal distance improvement accepted during relaxation in float mode.
#: Zero-cost residual cycles evaluate to tiny negatives under floating point;
#: accepting those as improvements can weave a cycle into the predecessor
#: chain.  Exact mode uses literal zero.
_DUST = 1e-12

# Residual edge kinds.
_SUPPLY_FWD = 0
_CROSS_FWD = 1
_CROSS_REV = 2
_SUPPLY_REV = 3


def _convert(value, exact):
    if exact:
        return value if isinstance(value, (Fraction, int)) else Fraction(value)
    return value if isinstance(value, (Fraction, int)) else float(value)


@dataclass(frozen=True)
class BipartiteFlowNetwork:
    """Immutable description of one dual network (additive or multiplicative)."""

    mode: str
    supply_cost: tuple
    cross: dict
    demand: object

    def __post_init__(self):
        if self.mode not in (ADDITIVE, MULTIPLICATIVE):
            raise ValidationError(f"unknown flow mode {self.mode!r}")
        if not self.supply_cost:
            raise ValidationError("network needs at least one instance")
        if not 0 <= self.demand <= 1:
            raise ValidationError(f"per-destination demand must lie in [0, 1], got {self.demand!r}")
        exact = isinstance(self.demand, Fraction) or any(
            isinstance(c, Fraction) for c in self.supply_cost)
        object.__setattr__(self, "exact", exact)
        n = len(self.supply_cost)
        for u in range(n):
            if (u, u) not in self.cross:
                raise ValidationError(f"diagonal cross edge ({u}, {u}) is required")
        if self.mode == MULTIPLICATIVE:
            for key, m in self.cross.items():
                if m <= 0:
                    raise ValidationError(f"multiplier on edge {key} must be positive, got {m!r}")

    @property
    def n(self) -> int:
        return len(self.supply_cost)

    @classmethod
    def additive(cls, phi_relation, phi_memberships, demand, *,
                 exact: bool = False, tol: float = DEFAULT_TOL) -> "BipartiteFlowNetwork":
        """Additive-mode network with cross costs M(u, v) = 1 - r(u, v).

        All cross edges are kept: a zero-strength pair contributes a cost-one
        edge, which matches its vacuous constraint and never harms the
        optimum.
        """
        rows = [list(row) for row in phi_relation]
        n = len(rows)
        one = Fraction(1) if exact else 1.0
        costs = tuple(_convert(a, exact) for a in phi_memberships)
        if len(costs) != n:
            raise ValidationError("memberships do not match the relation size")
        cross = {}
        for u in range(n):
            for v in range(n):
                m = one - _convert(rows[u][v], exact)
                if m < 0:
                    if m < -tol:
                        raise ValidationError(f"relation value above one at ({u}, {v})")
                    m = 0 * one
                cross[(u, v)] = m
        for u in range(n):
            cross[(u, u)] = 0 * one
        return cls(ADDITIVE, costs, cross, _convert(demand, exact))

    @classmethod
    def multiplicative(cls, phi_relation, phi_memberships, demand, *,
                       exact: bool = False, tol: float = DEFAULT_TOL) -> "BipartiteFlowNetwork":
        """Multiplicative-mode network with gains r(u, v) on cross edges.

        Pairs with r(u, v) <= tol generate no edge: a zero-strength pair
        imposes no constraint under the product t-norm.
        """
        rows = [list(row) for row in phi_relation]
        n = len(rows)
        one = Fraction(1) if exact else 1.0
        costs = tuple(_convert(a, exact) for a in phi_memberships)
        if len(costs) != n:
            raise ValidationError("memberships do not match the relation size")
        cross = {}
        for u in range(n):
            for v in range(n):
                m = _convert(rows[u][v], exact)
                if m > tol:
                    cross[(u, v)] = min(m, one)
        for u in range(n):
            cross[(u, u)] = one
        return cls(MULTIPLICATIVE, costs, cross, _convert(demand, exact))


@dataclass(frozen=True)
class PathFlow:
    """One simple supply-to-destination path flow (0, e_intermediate, f_destination)."""

    intermediate: int
    destination: int
    amount: object


@dataclass(frozen=True)
class FlowSolution:
    """Snapshot of a feasible flow: edge flows, delivered amounts and cost."""

    network: BipartiteFlowNetwork
    supply_flow: tuple
    cross_flow: dict
    delivered: tuple
    cost: object
    iterations: int


class ResidualNetwork:
    """Mutable flow state plus derived residual edges for one network.

    Reverse edges carry negated cost (additive) or reciprocal gain
    (multiplicative); a reverse edge exists only while its forward flow is
    positive.  The bipartite shape guarantees no reverse edge ever collides
    with a forward edge.
    """

    def __init__(self, network: BipartiteFlowNetwork):
        self.network = network
        n = network.n
        self.z0 = [0] * n
        self.z = {}
        self.delivered = [0] * n

    @classmethod
    def from_solution(cls, solution: FlowSolution) -> "ResidualNetwork":
        res = cls(solution.network)
        res.z0 = list(solution.supply_flow)
        res.z = dict(solution.cross_flow)
        res.delivered = list(solution.delivered)
        return res

    def copy(self) -> "ResidualNetwork":
        res = ResidualNetwork(self.network)
        res.z0 = list(self.z0)
        res.z = dict(self.z)
        res.delivered = list(self.delivered)
        return res

    @property
    def zero(self):
        return 0 if self.network.exact else ZERO_FLOW

    def node_count(self) -> int:
        return 2 * self.network.n + 1

    def intermediate_node(self, u: int) -> int:
        return 1 + u

    def destination_node(self, v: int) -> int:
        return 1 + self.network.n + v

    def residual_edges(self, *, include_supply_reverse: bool = True):
        """Deterministically ordered residual edges as (tail, head, kind, key)."""
        net = self.network
        n = net.n
        zero = self.zero
        edges = []
        for u in range(n):
            if 1 - self.z0[u] > zero:
                edges.append((0, 1 + u, _SUPPLY_FWD, u))
        for key in sorted(net.cross):
            u, v = key
            edges.append((1 + u, 1 + n + v, _CROSS_FWD, key))
        for key in sorted(self.z):
            if self.z[key] > zero:
                u, v = key
                edges.append((1 + n + v, 1 + u, _CROSS_REV, key))
        if include_supply_reverse:
            for u in range(n):
                if self.z0[u] > zero:
                    edges.append((1 + u, 0, _SUPPLY_REV, u))
        return edges

    def remaining_demand(self, targets) -> list:
        return [t - d for t, d in zip(targets, self.delivered)]

    def solution(self, iterations: int = 0) -> FlowSolution:
        zero = self.zero
        cross = {k: v for k, v in self.z.items() if v > zero}
        return FlowSolution(
            network=self.network,
            supply_flow=tuple(self.z0),
            cross_flow=cross,
            delivered=tuple(self.delivered),
            cost=flow_cost(self.network, self.z0, self.z),
            iterations=iterations,
        )

    def dump(self) -> str:
        """One line per original edge: ``from to cost capacity multiplier flow``."""
        net = self.network
        lines = []
        for u in range(net.n):
            lines.append(
                f"0 e{u} {_fmt(net.supply_cost[u])} 1 - {_fmt(self.z0[u])}")
        for key in sorted(net.cross):
            u, v = key
            flow = self.z.get(key, 0)
            if net.mode == ADDITIVE:
                lines.append(
                    f"e{u} f{v} {_fmt(net.cross[key])} inf - {_fmt(flow)}")
            else:
                lines.append(
                    f"e{u} f{v} 0 inf {_fmt(net.cross[key])} {_fmt(flow)}")
        return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def flow_cost(network: BipartiteFlowNetwork, z0, z):
    cost = sum(c * f for c, f in zip(network.supply_cost, z0))
    if network.mode == ADDITIVE:
        cost += sum(network.cross[key] * flow for key, flow in z.items())
    return cost


# ---------------------------------------------------------------------------
# Bellman-Ford over residual networks.
# ---------------------------------------------------------------------------


def _bellman_ford_additive(res: ResidualNetwork):
    """Shortest-path distances from the supply node over the residual edges.

    Returns (dist, pred) with ``None`` marking unreachable nodes.  Raises
    :class:`NegativeCycleError` when relaxation fails to settle, which can
    only happen through a solver bug.
    """
    net = res.network
    edges = res.residual_edges()
    size = res.node_count()
    dist = [None] * size
    pred = [None] * size
    dist[0] = 0 if net.exact else 0.0
    dust = 0 if net.exact else _DUST
    cross = net.cross
    costs = net.supply_cost
    last_changed = None
    for _ in range(size + 2):
        changed = False
        for tail, head, kind, key in edges:
            dt = dist[tail]
            if dt is None:
                continue
            if kind == _SUPPLY_FWD:
                cand = dt + costs[key]
            elif kind == _CROSS_FWD:
                cand = dt + cross[key]
            elif kind == _CROSS_REV:
                cand = dt - cross[key]
            else:
                cand = dt - costs[key]
            dh = dist[head]
            if dh is None or cand < dh - dust:
                dist[head] = cand
                pred[head] = (tail, kind, key)
                changed = True
                last_changed = head
        if not changed:
            return dist, pred
    raise NegativeCycleError(
        "negative-cost cycle in additive residual network",
        cycle=_walk_cycle(pred, last_changed, size),
    )


def _bellman_ford_multiplicative(res: ResidualNetwork, *, tol: float = DEFAULT_TOL):
    """Cheapest unit-delivery costs from the supply over the residual edges.

    The cost of a path is (first supply edge cost) divided by the product of
    the gains of its multiplier edges, the multiplicative counterpart of
    running Bellman-Ford on log-transformed weights.  Reverse supply edges
    cannot appear on a simple path from the supply, so they are checked after
    convergence: a cheaper-than-refund intermediate signals a negative cycle
    through the supply node.
    """
    net = res.network
    edges = res.residual_edges(include_supply_reverse=False)
    size = res.node_count()
    dist = [None] * size
    pred = [None] * size
    dist[0] = 0 if net.exact else 0.0
    dust = 0 if net.exact else _DUST
    cross = net.cross
    costs = net.supply_cost
    last_changed = None
    for _ in range(size + 2):
        changed = False
        for tail, head, kind, key in edges:
            dt = dist[tail]
            if dt is None:
                continue
            if kind == _SUPPLY_FWD:
                cand = costs[key]
            elif kind == _CROSS_FWD:
                cand = dt / cross[key]
            else:  # _CROSS_REV, gain 1 / m
                cand = dt * cross[key]
            dh = dist[head]
            if dh is None or cand < dh - dust:
                dist[head] = cand
                pred[head] = (tail, kind, key)
                changed = True
                last_changed = head
        if not changed:
            break
    else:
        raise NegativeCycleError(
            "gain cycle in multiplicative residual network",
            cycle=_walk_cycle(pred, last_changed, size),
        )
    zero = res.zero
    slack = 0 if net.exact else tol
    for u in range(net.n):
        du = dist[1 + u]
        if res.z0[u] > zero and du is not None and du < costs[u] - slack:
            raise NegativeCycleError(
                f"negative-cost cycle through the supply node at intermediate {u}",
                cycle=[0, 1 + u, 0],
            )
    return dist, pred


def _walk_cycle(pred, start, size):
    node = start
    for _ in range(size):
        if node is None or pred[node] is None:
            return []
        node = pred[node][0]
    cycle = [node]
    step = pred[node][0]
    while step != node and len(cycle) <= size:
        cycle.append(step)
        step = pred[step][0]
    cycle.reverse()
    return cycle


def cheapest_delivery_costs(res: ResidualNetwork) -> list:
    """Cheapest cost of delivering one unit to each destination node.

    Additive mode runs Bellman-Ford on the residual costs; multiplicative
    mode minimizes supply cost over the product of path gains.  Unreachable
    destinations report ``inf``.
    """
    if res.network.mode == ADDITIVE:
        dist, _ = _bellman_ford_additive(res)
    else:
        dist, _ = _bellman_ford_multiplicative(res)
    n = res.network.n
    return [dist[1 + n + v] if dist[1 + n + v] is not None else math.inf
            for v in range(n)]


def _extract_path(pred, sink):
    """Edge list from the supply node to ``sink`` following predecessors."""
    path = []
    node = sink
    while node != 0:
        entry = pred[node]
        if entry is None:
            return None
        tail, kind, key = entry
        path.append((tail, node, kind, key))
        node = tail
        if len(path) > len(pred):
            raise SolverError("predecessor chain does not reach the supply node")
    path.reverse()
    return path


# ---------------------------------------------------------------------------
# Engines.
# ---------------------------------------------------------------------------


class _EngineBase:
    mode = None

    def __init__(self, network: BipartiteFlowNetwork):
        if network.mode != self.mode:
            raise ValidationError(f"engine requires a {self.mode} network")
        self.network = network
        self.residual = ResidualNetwork(network)
        self.iterations = 0
        self._targets = [0] * network.n

    def _iteration_cap(self) -> int:
        n = self.network.n
        if self.network.mode == ADDITIVE:
            reach = 1
        else:
            smallest = min(self.network.cross.values())
            reach = math.ceil(1 / smallest)
        return 10 * n * n * (1 + reach)

    def run_to(self, target, *, on_iteration=None) -> "FlowSolution":
        """Deliver flow until every destination holds its target amount.

        ``target`` is a scalar or per-destination sequence; it may only grow
        between calls, so repeated calls realise an incremental demand sweep.
        """
        n = self.network.n
        if not hasattr(target, "__len__"):
            targets = [target] * n
        else:
            targets = list(target)
            if len(targets) != n:
                raise ValidationError("per-destination targets do not match the network")
        zero = self.residual.zero
        for j, t in enumerate(targets):
            if t < self._targets[j] - zero:
                raise ValidationError("targets cannot decrease across calls")
            if t > 1:
                raise ValidationError("per-destination demand cannot exceed one")
        self._targets = [max(a, b) for a, b in zip(targets, self._targets)]
        cap = self._iteration_cap()
        spent = 0
        for j in range(n):
            while self._targets[j] - self.residual.delivered[j] > zero:
                spent += 1
                if spent > cap:
                    raise IterationLimitError(
                        f"augmentation cap of {cap} exceeded",
                        residual=self._targets[j] - self.residual.delivered[j],
                    )
                self._augment(j, self._targets[j] - self.residual.delivered[j])
                self.iterations += 1
                if on_iteration is not None:
                    on_iteration(self)
        return self.solution()

    def solution(self) -> FlowSolution:
        return self.residual.solution(self.iterations)

    def _augment(self, j, remaining):
        raise NotImplementedError


class SuccessiveShortestPaths(_EngineBase):
    """Standard successive shortest paths on the additive bipartite network."""

    mode = ADDITIVE

    def _augment(self, j, remaining):
        res = self.residual
        dist, pred = _bellman_ford_additive(res)
        sink = res.destination_node(j)
        path = _extract_path(pred, sink) if dist[sink] is not None else None
        if path is None:
            raise SolverError(f"destination {j} is unreachable from the supply")
        amount = remaining
        for tail, head, kind, key in path:
            if kind == _SUPPLY_FWD:
                amount = min(amount, 1 - res.z0[key])
            elif kind == _CROSS_REV:
                amount = min(amount, res.z[key])
            elif kind == _SUPPLY_REV:
                raise SolverError("augmenting path revisits the supply node")
        if amount <= res.zero:
            raise SolverError("augmenting path has no residual capacity")
        for tail, head, kind, key in path:
            if kind == _SUPPLY_FWD:
                res.z0[key] += amount
            elif kind == _CROSS_FWD:
                res.z[key] = res.z.get(key, 0) + amount
            else:
                res.z[key] = _decrease(res.z[key], amount, res.zero)
        res.delivered[j] += amount


class GeneralizedSSP(_EngineBase):
    """Successive shortest paths generalized to gain-carrying cross edges.

    The largest amount sendable along a path is found by translating every
    edge capacity into supply units through the accumulated path gain, and
    flows are updated in the measure of each edge tail.
    """

    mode = MULTIPLICATIVE

    def _augment(self, j, remaining):
        res = self.residual
        net = self.network
        dist, pred = _bellman_ford_multiplicative(res)
        sink = res.destination_node(j)
        path = _extract_path(pred, sink) if dist[sink] is not None else None
        if path is None:
            raise SolverError(f"destination {j} is unreachable from the supply")
        one = Fraction(1) if net.exact else 1.0
        gain = one
        withdraw = None
        for tail, head, kind, key in path:
            if kind == _SUPPLY_FWD:
                cap = 1 - res.z0[key]
                bound = cap / gain
                withdraw = bound if withdraw is None else min(withdraw, bound)
            elif kind == _CROSS_FWD:
                gain = gain * net.cross[key]
            elif kind == _CROSS_REV:
                cap = net.cross[key] * res.z[key]
                bound = cap / gain
                withdraw = bound if withdraw is None else min(withdraw, bound)
                gain = gain / net.cross[key]
            else:
                raise SolverError("augmenting path revisits the supply node")
        bound = remaining / gain
        withdraw = bound if withdraw is None else min(withdraw, bound)
        if withdraw <= res.zero:
            raise SolverError("augmenting path has no residual capacity")
        gain = one
        for tail, head, kind, key in path:
            if kind == _SUPPLY_FWD:
                res.z0[key] += withdraw
            elif kind == _CROSS_FWD:
                res.z[key] = res.z.get(key, 0) + withdraw * gain
                gain = gain * net.cross[key]
            else:
                res.z[key] = _decrease(res.z[key], withdraw * gain / net.cross[key], res.zero)
                gain = gain / net.cross[key]
        res.delivered[j] += withdraw * gain


def _decrease(current, amount, zero):
    out = current - amount
    if out < 0:
        if out < -max(zero, 1e-9):
            raise SolverError("flow update drove an edge negative")
        out = 0 * current
    return out


def ssp_min_cost(network: BipartiteFlowNetwork, *, on_iteration=None) -> FlowSolution:
    """Optimal flow for an additive network via successive shortest paths."""
    engine = SuccessiveShortestPaths(network)
    return engine.run_to(network.demand, on_iteration=on_iteration)


def generalized_ssp(network: BipartiteFlowNetwork, *, on_iteration=None) -> FlowSolution:
    """Optimal flow for a multiplicative network via generalized SSP."""
    engine = GeneralizedSSP(network)
    return engine.run_to(network.demand, on_iteration=on_iteration)


# ---------------------------------------------------------------------------
# Post-processing.
# ---------------------------------------------------------------------------


def fix_middle_edges(solution: FlowSolution) -> FlowSolution:
    """Reroute zero-cost cycles so used intermediates feed their own destination.

    Any intermediate e_u with positive supply inflow ends up with positive
    flow on (e_u, f_u); the objective is unchanged for an optimal input (the
    rerouting cycles have zero cost there, up to the T-transitivity slack).
    """
    net = solution.network
    res = ResidualNetwork.from_solution(solution)
    zero = res.zero
    n = net.n
    for u in range(n):
        if res.z0[u] <= zero or res.z.get((u, u), 0) > zero:
            continue
        senders = sorted(a for (a, b), f in res.z.items()
                         if b == u and a != u and f > zero)
        receivers = sorted(b for (a, b), f in res.z.items()
                           if a == u and b != u and f > zero)
        moved = False
        for v in senders:
            if moved:
                break
            for w in receivers:
                if (v, w) not in net.cross:
                    continue
                if net.mode == ADDITIVE:
                    t = min(res.z[(v, u)], res.z[(u, w)])
                    if t <= zero:
                        continue
                    res.z[(u, u)] = res.z.get((u, u), 0) + t
                    res.z[(v, u)] = _decrease(res.z[(v, u)], t, zero)
                    res.z[(v, w)] = res.z.get((v, w), 0) + t
                    res.z[(u, w)] = _decrease(res.z[(u, w)], t, zero)
                else:
                    m_vu, m_uw, m_vw = net.cross[(v, u)], net.cross[(u, w)], net.cross[(v, w)]
                    growth = m_vw / (m_vu * m_uw)
                    t = min(m_vu * res.z[(v, u)], res.z[(u, w)] / growth)
                    if t <= zero:
                        continue
                    res.z[(u, u)] = res.z.get((u, u), 0) + t
                    res.z[(v, u)] = _decrease(res.z[(v, u)], t / m_vu, zero)
                    res.z[(v, w)] = res.z.get((v, w), 0) + t / m_vu
                    res.z[(u, w)] = _decrease(res.z[(u, w)], t * growth, zero)
                    if growth != 1:
                        res.z0[u] = _decrease(res.z0[u], t * (growth - 1), zero)
                moved = True
                break
        if not moved and senders and receivers:
            raise SolverError(f"cannot establish the middle edge at intermediate {u}")
    return res.solution(solution.iterations)


def decompose(solution: FlowSolution) -> list[PathFlow]:
    """Express the flow as simple supply-to-destination path flows.

    Each positive cross edge (e_u, f_v) yields one summand whose amount is
    the flow delivered at f_v; re-aggregating the summands reproduces the
    edge flows.
    """
    net = solution.network
    zero = ZERO_FLOW if not net.exact else 0
    out = []
    for key in sorted(solution.cross_flow):
        flow = solution.cross_flow[key]
        if flow <= zero:
            continue
        u, v = key
        delivered = flow if net.mode == ADDITIVE else flow * net.cross[key]
        out.append(PathFlow(intermediate=u, destination=v, amount=delivered))
    return out


# ---------------------------------------------------------------------------
# Certification helpers (used by tests and diagnostics).
# ---------------------------------------------------------------------------


def find_negative_cycle(res: ResidualNetwork, *, tol: float = 1e-9):
    """Search the whole residual network for a negative-cost cycle.

    Returns a node list describing one cycle, or ``None``.  This is the
    Bellman-Ford certificate used to audit engine invariants; it is
    deliberately independent of the engines' own shortest-path code paths.
    """
    if res.network.mode == ADDITIVE:
        return _find_cycle_additive(res, tol)
    return _find_cycle_multiplicative(res, tol)


def _find_cycle_additive(res, tol):
    net = res.network
    edges = res.residual_edges()
    size = res.node_count()
    slack = 0 if net.exact else tol
    dist = [0 if net.exact else 0.0] * size
    pred = [None] * size
    last = None
    for _ in range(size + 1):
        changed = False
        for tail, head, kind, key in edges:
            if kind == _SUPPLY_FWD:
                cand = dist[tail] + net.supply_cost[key]
            elif kind == _CROSS_FWD:
                cand = dist[tail] + net.cross[key]
            elif kind == _CROSS_REV:
                cand = dist[tail] - net.cross[key]
            else:
                cand = dist[tail] - net.supply_cost[key]
            if cand < dist[head] - slack:
                dist[head] = cand
                pred[head] = (tail, kind, key)
                changed = True
                last = head
        if not changed:
            return None
    return _walk_cycle(pred, last, size)


def _find_cycle_multiplicative(res, tol):
    net = res.network
    n = net.n
    zero = res.zero
    slack = 0 if net.exact else tol
    one = Fraction(1) if net.exact else 1.0

    multiplier_edges = []
    for key in sorted(net.cross):
        u, v = key
        multiplier_edges.append((1 + u, 1 + n + v, net.cross[key]))
    for key in sorted(res.z):
        if res.z[key] > zero:
            u, v = key
            multiplier_edges.append((1 + n + v, 1 + u, 1 / net.cross[key]))

    # Pure gain cycles: circulating flow must not grow.
    size = res.node_count()
    level = [one] * size
    pred = [None] * size
    last = None
    for _ in range(size + 1):
        changed = False
        for tail, head, gain in multiplier_edges:
            cand = level[tail] / gain
            if cand < level[head] * (1 - slack):
                level[head] = cand
                pred[head] = (tail, None, None)
                changed = True
                last = head
        if not changed:
            break
    else:
        return _walk_cycle(pred, last, size)

    # Cycles through the supply node: a reachable refund edge must not beat
    # the entry cost, i.e. cost(a) >= (max path gain a -> b) * cost(b).
    open_entries = [a for a in range(n) if 1 - res.z0[a] > zero]
    refunds = [b for b in range(n) if res.z0[b] > zero]
    for a in open_entries:
        best = [None] * size
        best[1 + a] = one
        for _ in range(size):
            changed = False
            for tail, head, gain in multiplier_edges:
                bt = best[tail]
                if bt is None:
                    continue
                cand = bt * gain
                if best[head] is None or cand > best[head] * (1 + slack):
                    best[head] = cand
                    changed = True
            if not changed:
                break
        for b in refunds:
            if b == a:
                continue
            reach = best[1 + b]
            if reach is not None and net.supply_cost[a] < reach * net.supply_cost[b] - slack:
                return [0, 1 + a, 1 + b, 0]
    return None
