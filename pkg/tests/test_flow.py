from fractions import Fraction

import numpy as np
import pytest

from granapprox import flow, oracle
from granapprox.errors import IterationLimitError, ValidationError
from helpers import quantile_lp, random_memberships, tl_preorder, tp_preorder


def additive_net(relation, memberships, demand, **kw):
    return flow.BipartiteFlowNetwork.additive(
        np.asarray(relation).tolist(), np.asarray(memberships).tolist(), demand, **kw)


def multiplicative_net(relation, memberships, demand, **kw):
    return flow.BipartiteFlowNetwork.multiplicative(
        np.asarray(relation).tolist(), np.asarray(memberships).tolist(), demand, **kw)


def test_single_instance_additive():
    net = additive_net([[1.0]], [0.4], 0.7)
    sol = flow.ssp_min_cost(net)
    assert sol.cost == pytest.approx(0.28)
    assert sol.supply_flow[0] == pytest.approx(0.7)
    paths = flow.decompose(sol)
    assert len(paths) == 1
    assert (paths[0].intermediate, paths[0].destination) == (0, 0)
    assert paths[0].amount == pytest.approx(0.7)


def test_two_instance_routings_match_enumeration():
    # Cheap supplier 2 serves destination 1 through the cross edge while its
    # capacity lasts; at full demand both unit supply edges must saturate.
    rel = np.array([[1.0, 0.7], [0.7, 1.0]])  # M(1,2) = M(2,1) = 0.3
    costs = np.array([0.9, 0.1])

    sol = flow.ssp_min_cost(additive_net(rel, costs, 0.4))
    # enumerated optimum: f1 and f2 both served by e2 (0.4 * (0.1 + 0.3) + 0.4 * 0.1)
    assert sol.cost == pytest.approx(0.2)
    assert sol.supply_flow[0] == pytest.approx(0.0)
    assert sol.supply_flow[1] == pytest.approx(0.8)

    sol = flow.ssp_min_cost(additive_net(rel, costs, 1.0))
    # both supply edges saturated; cross detours only add cost
    assert sol.cost == pytest.approx(1.0)
    assert sol.supply_flow == pytest.approx((1.0, 1.0))


def test_additive_cost_matches_simplex_dual():
    rng = np.random.default_rng(21)
    for _ in range(25):
        n = int(rng.integers(1, 9))
        rel = tl_preorder(rng, n)
        a = random_memberships(rng, n)
        p = float(rng.uniform(0.05, 0.95))
        sol = flow.ssp_min_cost(additive_net(rel, a, p))
        res = oracle.simplex_solve(quantile_lp(rel, a, p, "lukasiewicz"))
        assert res.status == "optimal"
        # strong duality: p * sum(a) - flow cost equals the primal loss
        assert p * a.sum() - sol.cost == pytest.approx(res.objective, abs=1e-9)


def test_generalized_cost_matches_simplex_dual():
    rng = np.random.default_rng(22)
    for _ in range(25):
        n = int(rng.integers(1, 7))
        rel = tp_preorder(rng, n)
        a = random_memberships(rng, n)
        p = float(rng.uniform(0.05, 0.95))
        sol = flow.generalized_ssp(multiplicative_net(rel, a, p))
        res = oracle.simplex_solve(quantile_lp(rel, a, p, "product"))
        assert res.status == "optimal"
        assert p * a.sum() - sol.cost == pytest.approx(res.objective, abs=1e-9)


def test_single_instance_multiplicative():
    net = multiplicative_net([[1.0]], [0.4], 0.7)
    sol = flow.generalized_ssp(net)
    assert sol.cost == pytest.approx(0.28)


def test_multiplicative_withdrawal_accounting():
    # Deliver 0.5 to f2 along (0, e1, f2) with gain 0.8: withdraw 0.625.
    rel = np.array([[1.0, 0.8], [0.8, 1.0]])
    costs = np.array([0.4, 0.9])
    net = multiplicative_net(rel, costs, 0.0)
    engine = flow.GeneralizedSSP(net)
    engine.run_to([0.0, 0.5])
    sol = engine.solution()
    assert sol.supply_flow[0] == pytest.approx(0.625)
    assert sol.supply_flow[1] == pytest.approx(0.0)
    assert sol.delivered[1] == pytest.approx(0.5)
    assert sol.cost == pytest.approx(0.4 * 0.625)


def test_zero_flow_delivery_costs_are_min_hop_costs():
    rng = np.random.default_rng(23)
    rel = tl_preorder(rng, 6)
    a = random_memberships(rng, 6)
    res = flow.ResidualNetwork(additive_net(rel, a, 0.3))
    costs = flow.cheapest_delivery_costs(res)
    M = 1.0 - rel
    expected = (a[:, None] + M).min(axis=0)
    assert np.allclose(costs, expected, atol=1e-12)

    res = flow.ResidualNetwork(multiplicative_net(tp_preorder(rng, 6), a, 0.3))
    costs = flow.cheapest_delivery_costs(res)
    rel_p = np.array([[res.network.cross.get((u, v), 0.0) for v in range(6)] for u in range(6)])
    expected = np.min(a[:, None] / rel_p, axis=0)
    assert np.allclose(costs, expected, atol=1e-12)


def test_decompose_reaggregates():
    rng = np.random.default_rng(24)
    for maker, solver in ((additive_net, flow.ssp_min_cost),
                          (multiplicative_net, flow.generalized_ssp)):
        for _ in range(10):
            n = int(rng.integers(1, 10))
            rel = tl_preorder(rng, n) if maker is additive_net else tp_preorder(rng, n)
            a = random_memberships(rng, n)
            sol = solver(maker(rel, a, float(rng.uniform(0.1, 0.9))))
            paths = flow.decompose(sol)
            delivered = np.zeros(n)
            for pathflow in paths:
                delivered[pathflow.destination] += pathflow.amount
            assert np.allclose(delivered, sol.delivered, atol=1e-9)
            assert len(paths) == len([f for f in sol.cross_flow.values() if f > 1e-12])


def test_middle_edge_fix_constructed_cycle():
    # R(v,u) * R(u,w) = R(v,w) exactly, flow through (0,e_v,f_u) and (0,e_u,f_w):
    # the reroute must establish (e_u, f_u) without changing the objective.
    rel = np.array([
        [1.0, 0.8, 0.72],
        [0.8, 1.0, 0.9],
        [0.72, 0.9, 1.0],
    ])
    costs = np.array([0.2, 0.5, 0.9])
    net = multiplicative_net(rel, costs, 0.0)
    res = flow.ResidualNetwork(net)
    # hand-built feasible flow: f1 <- e0 (gain 0.8), f2 <- e1 (gain 0.9)
    res.z0 = [0.5, 0.4, 0.0]
    res.z = {(0, 1): 0.5, (1, 2): 0.4}
    res.delivered = [0.0, 0.4, 0.36]
    sol = res.solution()
    assert sol.supply_flow[1] > 0 and sol.cross_flow.get((1, 1), 0.0) == 0.0
    fixed = flow.fix_middle_edges(sol)
    assert fixed.cross_flow.get((1, 1), 0.0) > 0
    assert fixed.cost == pytest.approx(sol.cost, abs=1e-12)
    assert np.allclose(fixed.delivered, sol.delivered, atol=1e-12)


def test_middle_edge_fix_noop_when_satisfied():
    net = additive_net([[1.0]], [0.4], 0.7)
    sol = flow.ssp_min_cost(net)
    fixed = flow.fix_middle_edges(sol)
    assert fixed.cross_flow == sol.cross_flow


def test_invariants_along_iterations():
    rng = np.random.default_rng(25)
    for maker, engine_cls in ((additive_net, flow.SuccessiveShortestPaths),
                              (multiplicative_net, flow.GeneralizedSSP)):
        for _ in range(8):
            n = int(rng.integers(2, 7))
            rel = tl_preorder(rng, n) if maker is additive_net else tp_preorder(rng, n)
            a = random_memberships(rng, n)
            net = maker(rel, a, float(rng.uniform(0.2, 0.95)))
            engine = engine_cls(net)
            previous = [flow.cheapest_delivery_costs(engine.residual)]

            def check(eng):
                snapshot = eng.residual.copy()
                assert flow.find_negative_cycle(snapshot) is None
                costs = flow.cheapest_delivery_costs(snapshot)
                assert np.all(np.asarray(costs) >= np.asarray(previous[-1]) - 1e-9)
                previous.append(costs)

            engine.run_to(net.demand, on_iteration=check)
            assert engine.iterations >= 1


def test_negative_cycle_certifier_flags_bad_flow():
    # Force a deliberately suboptimal flow and certify the negative cycle.
    rel = np.array([[1.0, 0.9], [0.9, 1.0]])
    a = np.array([0.9, 0.0])
    net = additive_net(rel, a, 0.5)
    res = flow.ResidualNetwork(net)
    res.z0 = [0.5, 0.5]
    res.z = {(0, 0): 0.5, (1, 1): 0.5}
    res.delivered = [0.5, 0.5]
    # serving f0 via the expensive e0 while e1 has slack: cycle 0-e1-f0-e0-0
    assert flow.find_negative_cycle(res) is not None
    sol = flow.ssp_min_cost(additive_net(rel, a, 0.5))
    assert flow.find_negative_cycle(flow.ResidualNetwork.from_solution(sol)) is None


def test_exact_rational_mode():
    rel = [[Fraction(1), Fraction(9, 10)], [Fraction(9, 10), Fraction(1)]]
    a = [Fraction(7, 10), Fraction(1, 5)]
    net = flow.BipartiteFlowNetwork.additive(rel, a, Fraction(1, 2), exact=True)
    assert net.exact
    sol = flow.ssp_min_cost(net)
    assert isinstance(sol.cost, Fraction)
    # exact optimum cross-checked against the float engine
    float_sol = flow.ssp_min_cost(additive_net(np.array(rel, dtype=float),
                                               np.array(a, dtype=float), 0.5))
    assert float(sol.cost) == pytest.approx(float_sol.cost, abs=1e-12)
    res = flow.ResidualNetwork.from_solution(sol)
    costs = flow.cheapest_delivery_costs(res)
    assert all(isinstance(c, (Fraction, int)) for c in costs)

    netm = flow.BipartiteFlowNetwork.multiplicative(rel, a, Fraction(1, 2), exact=True)
    solm = flow.generalized_ssp(netm)
    assert isinstance(solm.cost, Fraction)
    assert flow.find_negative_cycle(flow.ResidualNetwork.from_solution(solm)) is None


def test_dump_is_deterministic():
    rng = np.random.default_rng(26)
    rel = tl_preorder(rng, 4)
    a = random_memberships(rng, 4)
    sol = flow.ssp_min_cost(additive_net(rel, a, 0.5))
    res = flow.ResidualNetwork.from_solution(sol)
    first, second = res.dump(), res.dump()
    assert first == second
    lines = first.strip().split("\n")
    assert len(lines) == 4 + 16
    assert all(len(line.split()) == 6 for line in lines)


def test_engine_validation():
    net = additive_net([[1.0]], [0.4], 0.7)
    with pytest.raises(ValidationError):
        flow.GeneralizedSSP(net)
    with pytest.raises(ValidationError):
        flow.BipartiteFlowNetwork.multiplicative([[1.0, 0.0], [0.0, 1.0]],
                                                 [0.5, 0.5], 1.5)
    engine = flow.SuccessiveShortestPaths(net)
    engine.run_to(0.5)
    with pytest.raises(ValidationError):
        engine.run_to(0.3)


def test_multiplier_positivity_enforced():
    with pytest.raises(ValidationError):
        flow.BipartiteFlowNetwork(
            "multiplicative", (0.5,), {(0, 0): 0.0}, 0.5)


def test_iris_median_residual_extraction():
    from helpers import IRIS_LABELS, IRIS_RELATION
    sol = flow.ssp_min_cost(additive_net(IRIS_RELATION, IRIS_LABELS, 0.5))
    fixed = flow.fix_middle_edges(sol)
    costs = flow.cheapest_delivery_costs(flow.ResidualNetwork.from_solution(fixed))
    assert np.max(np.abs(np.array(costs) - np.array([0.326, 0.292, 0.8, 1.0]))) <= 0.005


def test_post_fix_solutions_satisfy_complementary_slackness():
    # After middle-edge fixing, the delivery costs pin the primal solution:
    # interior supply flow forces equality with the supply cost, saturation
    # and emptiness force the matching inequalities, and every flow-carrying
    # cross edge is tight.
    rng = np.random.default_rng(28)
    for maker, solver in ((additive_net, flow.ssp_min_cost),
                          (multiplicative_net, flow.generalized_ssp)):
        for _ in range(12):
            n = int(rng.integers(2, 8))
            rel = tl_preorder(rng, n) if maker is additive_net else tp_preorder(rng, n)
            a = random_memberships(rng, n)
            net = maker(rel, a, float(rng.uniform(0.1, 0.95)))
            fixed = flow.fix_middle_edges(solver(net))
            alpha = flow.cheapest_delivery_costs(flow.ResidualNetwork.from_solution(fixed))
            for u in range(n):
                supply = fixed.supply_flow[u]
                if supply <= 1e-12:
                    assert alpha[u] <= a[u] + 1e-9
                elif supply >= 1.0 - 1e-12:
                    assert alpha[u] >= a[u] - 1e-9
                else:
                    assert alpha[u] == pytest.approx(a[u], abs=1e-9)
            for (u, v), z in fixed.cross_flow.items():
                if z <= 1e-12:
                    continue
                if net.mode == flow.ADDITIVE:
                    assert alpha[v] - alpha[u] == pytest.approx(
                        net.cross[(u, v)], abs=1e-9)
                else:
                    assert alpha[u] == pytest.approx(
                        net.cross[(u, v)] * alpha[v], abs=1e-9)


def test_iteration_cap_is_a_diagnostic_failure():
    rng = np.random.default_rng(27)
    net = additive_net(tl_preorder(rng, 4), random_memberships(rng, 4), 0.9)
    engine = flow.SuccessiveShortestPaths(net)
    engine._iteration_cap = lambda: 1
    with pytest.raises(IterationLimitError):
        engine.run_to(net.demand)
