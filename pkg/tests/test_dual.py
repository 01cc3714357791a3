import math

import numpy as np
import pytest

from jtlearn.baselines import chow_liu
from jtlearn.dual import (
    DualState,
    SpaceEntropies,
    clique_weights,
    constraint_violations,
    dual_value,
    edge_weights,
    lagrangian,
    primal_cost,
    residuals,
    solve,
    supergradient_step,
)
from jtlearn.rounding import DecomposableGraph, graph_entropy
from jtlearn.space import build_space
from jtlearn.synthetic import chain_cliques, make_ground_truth
from oracles import brute_best_forest, brute_best_hyperforest, ktrees


@pytest.fixture(scope="module")
def small():
    space = build_space(5, 2)
    gt = make_ground_truth("chain", 5, 2, 8, seed=1)
    oracle = gt.oracle()
    return space, oracle, SpaceEntropies.from_oracle(space, oracle), gt


def random_state(space, rng, a=0.5):
    return DualState(rng.random(space.n), rng.normal(size=space.n),
                     rng.random((space.n_edges, 2)), rng.random(space.n_cliques), 3, a)


def test_weights_at_origin(small):
    space, oracle, ent, _ = small
    zero = DualState.zeros(space)
    np.testing.assert_array_equal(clique_weights(space, ent, zero), ent.clique)
    np.testing.assert_array_equal(edge_weights(space, ent, zero), ent.separator)


def test_weights_linear_in_eta(small):
    space, _, ent, _ = small
    s = DualState.zeros(space)
    s.eta[4] = 1.0
    diff = clique_weights(space, ent, s) - ent.clique
    assert diff[4] == pytest.approx(1.0)
    np.testing.assert_array_equal(np.delete(diff, 4), 0.0)
    a, b = space.edge_a[0], space.edge_b[0]
    s = DualState.zeros(space)
    s.eta[[a, b]] = 1.0
    assert edge_weights(space, ent, s)[0] == pytest.approx(ent.separator[0] + 2)


def test_weights_match_definition(small):
    space, _, ent, _ = small
    s = random_state(space, np.random.default_rng(0))
    cw, ew = clique_weights(space, ent, s), edge_weights(space, ent, s)
    for c in range(space.n_cliques):
        lam = sum(s.lam[e, 0] if space.edge_a[e] == c else s.lam[e, 1]
                  for e in space.incident_edges(c))
        want = ent.clique[c] - sum(s.mu[i] + s.gamma[i] for i in space.clique(c)) - lam + s.eta[c]
        assert cw[c] == pytest.approx(want)
    for e in range(space.n_edges):
        want = (ent.separator[e] - s.mu[space.separators[e]].sum() - s.lam[e].sum()
                + s.eta[space.edge_a[e]] + s.eta[space.edge_b[e]])
        assert ew[e] == pytest.approx(want)


def test_k1_weights_at_singleton_point():
    space = build_space(6, 1)
    rng = np.random.default_rng(2)
    a = rng.normal(size=(6, 10))
    from jtlearn.entropy import EntropyOracle
    oracle = EntropyOracle.from_covariance(a @ a.T / 10 + 0.3 * np.eye(6))
    ent = SpaceEntropies.from_oracle(space, oracle)
    s = DualState.zeros(space)
    s.mu = ent.singleton.copy()
    mi = np.array([oracle.mutual_information(c) for c in space.cliques])
    np.testing.assert_allclose(clique_weights(space, ent, s), -mi, atol=1e-12)
    np.testing.assert_allclose(edge_weights(space, ent, s), 0.0, atol=1e-12)


def test_lagrangian_regrouping(small):
    space, _, ent, _ = small
    rng = np.random.default_rng(3)
    for _ in range(20):
        s = random_state(space, rng)
        tau, rho = rng.random(space.n_cliques), rng.random(space.n_edges)
        regrouped = (clique_weights(space, ent, s) @ tau - edge_weights(space, ent, s) @ rho
                     + np.sum(s.mu + s.gamma))
        assert regrouped == pytest.approx(lagrangian(space, ent, tau, rho, s), abs=1e-9)


def test_dual_value_at_origin(small):
    space, _, ent, _ = small
    ev = dual_value(space, ent, DualState.zeros(space))
    cliques = space.cliques.tolist()
    q1 = -brute_best_hyperforest(5, cliques, -ent.clique, 3)
    q2 = -brute_best_forest(space.n_cliques, space.edge_a.tolist(), space.edge_b.tolist(),
                            ent.separator, 2)
    assert ev.q1 == pytest.approx(q1) and ev.q2 == pytest.approx(q2) and ev.q3 == 0
    assert ev.Q == pytest.approx(q1 + q2)


def test_dual_value_is_lagrangian_at_certificates(small):
    space, _, ent, _ = small
    s = random_state(space, np.random.default_rng(4))
    ev = dual_value(space, ent, s)
    assert ev.Q == pytest.approx(lagrangian(space, ent, ev.tau, ev.rho, s))


def test_weak_duality_random_points(small):
    space, oracle, ent, _ = small
    best = min(sum(oracle(c) for c in cl) - sum(oracle(sp) for sp in seps)
               for cl, seps in ktrees(5, 2))
    rng = np.random.default_rng(5)
    for _ in range(50):
        assert dual_value(space, ent, random_state(space, rng)).Q <= best + 1e-9


def test_ground_truth_indicator_cost(small):
    space, oracle, ent, gt = small
    tau, rho = gt.graph.indicators(space)
    assert primal_cost(space, ent, tau, rho) == pytest.approx(gt.optimal_entropy)
    assert primal_cost(space, ent, np.zeros(space.n_cliques), np.zeros(space.n_edges)) == 0
    v = constraint_violations(space, tau, rho)
    assert all(x == pytest.approx(0.0, abs=1e-12) for x in v.values())


def test_step_fixed_point(small):
    space, _, _, gt = small
    tau, rho = gt.graph.indicators(space)
    # Junction tree satisfies all equality / tight constraints except slack ones.
    s = DualState.zeros(space, a=1.0)
    nxt = supergradient_step(s, tau, rho, space)
    assert nxt.t == 1
    np.testing.assert_array_equal(nxt.mu, 0.0)
    np.testing.assert_array_equal(nxt.gamma, 0.0)  # residual <= 0, projected to 0


def test_step_examples(small):
    space, _, _, _ = small
    s = DualState.zeros(space, a=0.5)
    s.t = 3
    tau = np.zeros(space.n_cliques)
    rho = np.zeros(space.n_edges)
    nxt = supergradient_step(s, tau, rho, space)
    alpha = 0.5 / math.sqrt(4)
    np.testing.assert_allclose(nxt.gamma, alpha)  # nothing covered
    # tau(C)=1, rho=0: edge constraint slack, multiplier pushed down onto 0.
    s.lam[:] = 1.0
    tau[space.edge_a[0]] = 1.0
    nxt = supergradient_step(s, tau, rho, space)
    assert nxt.lam[0, 0] == pytest.approx(1.0 - alpha)
    # rho=1 with tau(C)=0: violated edge constraint, multiplier grows.
    rho[0] = 1.0
    tau[:] = 0.0
    nxt = supergradient_step(s, tau, rho, space)
    assert nxt.lam[0, 0] == pytest.approx(1.0 + alpha)
    assert (nxt.lam >= 0).all() and (nxt.eta >= 0).all() and (nxt.gamma >= 0).all()


def test_residuals_are_supergradients(small):
    space, _, ent, _ = small
    rng = np.random.default_rng(6)
    for _ in range(20):
        s = random_state(space, rng)
        ev = dual_value(space, ent, s)
        g = residuals(space, ev.tau, ev.rho)
        t = random_state(space, rng)
        lin = ev.Q + (g["cover"] @ (t.gamma - s.gamma) + g["rip"] @ (t.mu - s.mu)
                      + np.sum(g["edge"] * (t.lam - s.lam)) + g["clique"] @ (t.eta - s.eta))
        assert dual_value(space, ent, t).Q <= lin + 1e-9


def test_solve_single_iteration(small):
    space, _, ent, _ = small
    tr = solve(space, ent, T=1)
    assert tr.T == 1
    assert tr.Q[0] == pytest.approx(dual_value(space, ent, DualState.zeros(space)).Q)


def test_solve_bookkeeping(small, tmp_path):
    space, _, ent, _ = small
    tr = solve(space, ent, T=200, a=0.1)
    assert tr.best_Q == tr.Q.max() and tr.Q[tr.best_t - 1] == tr.best_Q
    assert (tr.tau_avg >= 0).all() and (tr.tau_avg <= 1).all()
    assert (tr.rho_avg >= 0).all() and (tr.rho_avg <= 1).all()
    assert tr.tau_avg.sum() == pytest.approx(3) and tr.rho_avg.sum() == pytest.approx(2)
    np.testing.assert_allclose(tr.Q, tr.q1 + tr.q2 + tr.q3)
    path = tmp_path / "trace.jsonl"
    tr.write_jsonl(path)
    lines = path.read_text().splitlines()
    assert len(lines) == 200
    import json
    rec = json.loads(lines[0])
    assert set(rec) == {"t", "Q", "q1", "q2", "q3", "viol_cover", "viol_rip", "viol_edge",
                        "viol_clique"}
    with pytest.raises(ValueError):
        solve(space, ent, T=0)
    with pytest.raises(ValueError):
        solve(space, ent, T=5, a=-1.0)


def test_box_variant_is_weaker(small):
    space, _, ent, _ = small
    rng = np.random.default_rng(7)
    for _ in range(20):
        s = random_state(space, rng)
        assert dual_value(space, ent, s, box=True).Q <= dual_value(space, ent, s).Q + 1e-12


def test_k1_singleton_point_attains_chow_liu():
    space = build_space(6, 1)
    gt = make_ground_truth("chain", 6, 1, 4, seed=3)
    oracle = gt.oracle()
    ent = SpaceEntropies.from_oracle(space, oracle)
    s = DualState.zeros(space)
    s.mu = ent.singleton.copy()
    tree = chow_liu(oracle, 6)
    assert dual_value(space, ent, s).Q == pytest.approx(graph_entropy(tree, oracle), abs=1e-9)


def test_chain_truth_is_junction_tree():
    g = DecomposableGraph.from_cliques(6, chain_cliques(6, 2))
    space = build_space(6, 2)
    tau, rho = g.indicators(space)
    assert tau.sum() == 4 and rho.sum() == 3
