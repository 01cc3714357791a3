"""Lagrangian dual of the relaxed junction-tree problem and its ascent.

Dualised constraints and their multipliers:

* covering, ``sum_{C ∋ i} tau(C) >= 1``: ``gamma_i >= 0``
* running intersection, ``sum_{e : i in sep(e)} rho(e) - sum_{C ∋ i} tau(C) + 1 = 0``: ``mu_i``
* edge, ``rho(C,D) <= tau(C)`` for both endpoints: ``lam[e, 0]`` (C = edge_a)
  and ``lam[e, 1]`` (C = edge_b), both ``>= 0``
* clique, ``tau(C) <= sum_{e ∋ C} rho(e)``: ``eta_C >= 0``

The cardinality, box and (hyper)forest polytope constraints stay inside the
two greedy subproblems.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .hyperforest import evaluate_q1
from .forest import evaluate_q2


@dataclass(frozen=True)
class SpaceEntropies:
    """Frozen entropy arrays aligned with a :class:`CliqueSpace`."""

    clique: np.ndarray
    separator: np.ndarray
    singleton: np.ndarray

    @classmethod
    def from_oracle(cls, space, oracle) -> "SpaceEntropies":
        return cls(oracle.clique_entropies(space), oracle.separator_entropies(space),
                   oracle.singletons())


def _as_entropies(space, ent) -> SpaceEntropies:
    return ent if isinstance(ent, SpaceEntropies) else SpaceEntropies.from_oracle(space, ent)


def default_step(ent: SpaceEntropies) -> float:
    scale = max(np.abs(ent.clique).max(), np.abs(ent.separator).max())
    return 1.0 / (1.0 + float(scale))


@dataclass
class DualState:
    gamma: np.ndarray
    mu: np.ndarray
    lam: np.ndarray  # shape (m, 2)
    eta: np.ndarray
    t: int = 0
    a: float = 1.0

    @classmethod
    def zeros(cls, space, a: float = 1.0) -> "DualState":
        return cls(np.zeros(space.n), np.zeros(space.n), np.zeros((space.n_edges, 2)),
                   np.zeros(space.n_cliques), 0, a)

    def copy(self) -> "DualState":
        return DualState(self.gamma.copy(), self.mu.copy(), self.lam.copy(),
                         self.eta.copy(), self.t, self.a)


def clique_weights(space, ent, dual: DualState) -> np.ndarray:
    """Coefficient of ``tau(C)`` in the Lagrangian."""
    ent = _as_entropies(space, ent)
    r = space.n_cliques
    lam_out = (np.bincount(space.edge_a, weights=dual.lam[:, 0], minlength=r)
               + np.bincount(space.edge_b, weights=dual.lam[:, 1], minlength=r))
    return ent.clique - space.clique_incidence @ (dual.mu + dual.gamma) - lam_out + dual.eta


def edge_weights(space, ent, dual: DualState) -> np.ndarray:
    """Weight of edge ``(C, D)`` in the forest subproblem (enters with a minus sign)."""
    ent = _as_entropies(space, ent)
    return (ent.separator - space.separator_incidence @ dual.mu - dual.lam[:, 0] - dual.lam[:, 1]
            + dual.eta[space.edge_a] + dual.eta[space.edge_b])


class DualEval(NamedTuple):
    Q: float
    q1: float
    q2: float
    q3: float
    tau: np.ndarray
    rho: np.ndarray


def dual_value(space, ent, dual: DualState, box: bool = False) -> DualEval:
    """Evaluate the dual function and the subproblem minimisers at ``dual``.

    ``box=True`` replaces the hyperforest polytope by the unit box in the clique
    subproblem, which gives a weaker bound.
    """
    ent = _as_entropies(space, ent)
    n, k = space.n, space.k
    q1, tau = evaluate_q1(space, clique_weights(space, ent, dual), n - k, box=box)
    q2, rho = evaluate_q2(space, edge_weights(space, ent, dual), n - k - 1)
    q3 = float(np.sum(dual.mu + dual.gamma))
    return DualEval(q1 + q2 + q3, q1, q2, q3, tau, rho)


def lagrangian(space, ent, tau, rho, dual: DualState) -> float:
    """Term-by-term Lagrangian: primal cost plus multiplier-weighted residuals."""
    ent = _as_entropies(space, ent)
    res = residuals(space, tau, rho)
    return (primal_cost(space, ent, tau, rho)
            + float(dual.gamma @ res["cover"]) + float(dual.mu @ res["rip"])
            + float(np.sum(dual.lam * res["edge"])) + float(dual.eta @ res["clique"]))


def residuals(space, tau, rho) -> dict:
    """Left-hand sides ``g`` of the dualised constraints written as ``g <= 0`` / ``g = 0``.

    These are also the supergradient of the dual function when ``(tau, rho)``
    are the subproblem minimisers.
    """
    cover = space.vertex_cover(tau)
    edge = np.empty((space.n_edges, 2))
    edge[:, 0] = rho - tau[space.edge_a]
    edge[:, 1] = rho - tau[space.edge_b]
    return {
        "cover": 1.0 - cover,
        "rip": space.separator_cover(rho) - cover + 1.0,
        "edge": edge,
        "clique": tau - space.clique_degree(rho),
    }


def constraint_violations(space, tau, rho) -> dict:
    """Largest amount by which each dualised constraint family is violated."""
    return _violations(residuals(space, tau, rho))


def _violations(g) -> dict:
    return {
        "cover": max(0.0, float(g["cover"].max())),
        "rip": float(np.abs(g["rip"]).max()),
        "edge": max(0.0, float(g["edge"].max())),
        "clique": max(0.0, float(g["clique"].max())),
    }


def supergradient_step(state: DualState, tau, rho, space, g=None) -> DualState:
    """One projected supergradient step with ``alpha = a / sqrt(t)``, t counted from 1.

    ``g`` may carry precomputed :func:`residuals` of ``(tau, rho)``.
    """
    if g is None:
        g = residuals(space, tau, rho)
    t = state.t + 1
    alpha = state.a / math.sqrt(t)
    return DualState(
        gamma=np.maximum(state.gamma + alpha * g["cover"], 0.0),
        mu=state.mu + alpha * g["rip"],
        lam=np.maximum(state.lam + alpha * g["edge"], 0.0),
        eta=np.maximum(state.eta + alpha * g["clique"], 0.0),
        t=t,
        a=state.a,
    )


def primal_cost(space, ent, tau, rho) -> float:
    """``sum_C H(C) tau(C) - sum_(C,D) H(C & D) rho(C,D)``; fractional inputs allowed."""
    ent = _as_entropies(space, ent)
    return float(ent.clique @ tau - ent.separator @ rho)


VIOLATION_KEYS = ("cover", "rip", "edge", "clique")


@dataclass
class SolveTrace:
    """Per-iteration record of a supergradient run.

    ``violations[t-1]`` holds the violations of the averaged iterates after
    ``t`` iterations, in the order of :data:`VIOLATION_KEYS`.
    """

    Q: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    q3: np.ndarray
    violations: np.ndarray
    tau_avg: np.ndarray
    rho_avg: np.ndarray
    best_Q: float
    best_t: int
    state: DualState
    box: bool = False
    iter_seconds: np.ndarray = field(default=None, repr=False)

    @property
    def T(self) -> int:
        return len(self.Q)

    def records(self):
        for t in range(self.T):
            rec = {"t": t + 1, "Q": float(self.Q[t]), "q1": float(self.q1[t]),
                   "q2": float(self.q2[t]), "q3": float(self.q3[t])}
            for j, key in enumerate(VIOLATION_KEYS):
                rec[f"viol_{key}"] = float(self.violations[t, j])
            yield rec

    def write_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            for rec in self.records():
                fh.write(json.dumps(rec) + "\n")


def solve(space, ent, T: int = 1000, a: float | None = None, box: bool = False,
          timing: bool = False) -> SolveTrace:
    """Projected supergradient ascent from the zero multipliers.

    Parameters
    ----------
    T : int
        Number of iterations.
    a : float, optional
        Step constant; defaults to ``1 / (1 + max |H|)`` over clique and
        separator entropies.
    box : bool
        Drop the hyperforest constraint from the clique subproblem.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    ent = _as_entropies(space, ent)
    if a is None:
        a = default_step(ent)
    if a <= 0:
        raise ValueError("step constant must be positive")
    state = DualState.zeros(space, a)
    Q, q1, q2, q3 = (np.empty(T) for _ in range(4))
    viol = np.empty((T, len(VIOLATION_KEYS)))
    tau_sum = np.zeros(space.n_cliques)
    rho_sum = np.zeros(space.n_edges)
    # Residuals are affine, so those of the averaged iterates are averaged residuals.
    g_sum = {key: 0.0 for key in VIOLATION_KEYS}
    seconds = np.empty(T) if timing else None
    for t in range(T):
        start = time.perf_counter() if timing else 0.0
        ev = dual_value(space, ent, state, box=box)
        Q[t], q1[t], q2[t], q3[t] = ev.Q, ev.q1, ev.q2, ev.q3
        tau_sum += ev.tau
        rho_sum += ev.rho
        g = residuals(space, ev.tau, ev.rho)
        for key in VIOLATION_KEYS:
            g_sum[key] = g_sum[key] + g[key]
        v = _violations({key: g_sum[key] / (t + 1) for key in VIOLATION_KEYS})
        viol[t] = [v[key] for key in VIOLATION_KEYS]
        state = supergradient_step(state, ev.tau, ev.rho, space, g)
        if timing:
            seconds[t] = time.perf_counter() - start
    best_t = int(np.argmax(Q))
    return SolveTrace(Q, q1, q2, q3, viol, tau_sum / T, rho_sum / T,
                      float(Q[best_t]), best_t + 1, state, box, seconds)
