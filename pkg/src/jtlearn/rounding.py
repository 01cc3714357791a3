"""Decomposable graphs, maximum cardinality search and greedy rounding.

Rounding turns averaged clique selections into a decomposable graph of
treewidth at most k: cliques are added in decreasing order of their averaged
selection, each one kept only if the graph stays chordal with small enough
cliques, until the graph is a k-tree (a maximal junction tree with n - k
cliques of size k + 1).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
import numpy as np

from .forest import greedy_order


def mcs_order(adj: np.ndarray) -> list[int]:
    """Maximum cardinality search visit order, ties to the lowest vertex."""
    n = adj.shape[0]
    nbrs = [np.flatnonzero(adj[v]).tolist() for v in range(n)]
    weight = [0] * n
    done = [False] * n
    order = []
    for _ in range(n):
        best, best_w = -1, -1
        for v in range(n):
            if not done[v] and weight[v] > best_w:
                best, best_w = v, weight[v]
        done[best] = True
        order.append(best)
        for u in nbrs[best]:
            if not done[u]:
                weight[u] += 1
    return order


def _earlier_neighbours(adj, order):
    pos = {v: i for i, v in enumerate(order)}
    return [[u for u in np.flatnonzero(adj[v]).tolist() if pos[u] < pos[v]] for v in order], pos


def mcs_decomposability(adj) -> tuple[bool, int | None]:
    """Chordality test via MCS; returns ``(decomposable, treewidth)``.

    The MCS order reversed is a perfect elimination ordering iff the graph is
    chordal. Treewidth is ``None`` when the graph is not decomposable.
    """
    adj = np.asarray(adj, dtype=bool)
    if adj.shape[0] == 0:
        return True, 0
    order = mcs_order(adj)
    earlier, pos = _earlier_neighbours(adj, order)
    width = 0
    for v, before in zip(order, earlier):
        if len(before) > 1:
            # Earlier neighbours must form a clique; checking them against the
            # most recently numbered one suffices (Tarjan & Yannakakis).
            last = max(before, key=pos.__getitem__)
            if not all(adj[last, u] for u in before if u != last):
                return False, None
        width = max(width, len(before))
    return True, width


def maximal_cliques(adj) -> list[tuple[int, ...]]:
    """Maximal cliques of a chordal graph, in MCS order."""
    adj = np.asarray(adj, dtype=bool)
    order = mcs_order(adj)
    earlier, _ = _earlier_neighbours(adj, order)
    candidates = [frozenset(b) | {v} for v, b in zip(order, earlier)]
    cliques = []
    for i, c in enumerate(candidates):
        if not any(c < other for other in candidates) and \
                not any(c == other for other in candidates[:i]):
            cliques.append(tuple(sorted(c)))
    return cliques


def n_components(adj) -> int:
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    count = 0
    for s in range(n):
        if seen[s]:
            continue
        count += 1
        seen[s] = True
        queue = [s]
        while queue:
            v = queue.pop()
            for u in np.flatnonzero(adj[v] & ~seen):
                seen[u] = True
                queue.append(u)
    return count


def clique_adjacency(n: int, cliques) -> np.ndarray:
    adj = np.zeros((n, n), dtype=bool)
    for c in cliques:
        idx = list(c)
        adj[np.ix_(idx, idx)] = True
    np.fill_diagonal(adj, False)
    return adj


class NotDecomposable(ValueError):
    pass


def junction_tree_from_cliques(cliques) -> list[tuple[int, int, tuple[int, ...]]]:
    """Junction tree over ``cliques`` from a perfect sequence.

    Each clique (after the first of its component) is joined to an earlier
    clique containing its intersection with everything before it. Returns
    ``(i, j, separator)`` triples with ``i < j`` indexing ``cliques``;
    disconnected inputs give a forest.
    """
    cliques = [tuple(sorted(c)) for c in cliques]
    if not cliques:
        return []
    n = 1 + max(max(c) for c in cliques if c)
    adj = clique_adjacency(n, cliques)
    covered = {v for c in cliques for v in c}
    ok, _ = mcs_decomposability(adj)
    found = [c for c in maximal_cliques(adj) if set(c) <= covered] if ok else []
    if not ok or sorted(found) != sorted(set(cliques)) or len(set(cliques)) != len(cliques):
        raise NotDecomposable("cliques are not the maximal cliques of a decomposable graph")
    order = mcs_order(adj)
    pos = {v: i for i, v in enumerate(order)}
    # Cliques sorted by the MCS position of their last-numbered vertex form a
    # perfect sequence.
    seq = sorted(range(len(cliques)), key=lambda c: max(pos[v] for v in cliques[c]))
    edges = []
    seen: set = set()
    for j, c in enumerate(seq):
        sep = seen.intersection(cliques[c])
        if sep:
            parent = next(p for p in seq[:j] if sep <= set(cliques[p]))
            a, b = sorted((parent, c))
            edges.append((a, b, tuple(sorted(sep))))
        seen.update(cliques[c])
    return edges


def running_intersection_holds(cliques, tree) -> bool:
    """Each vertex's cliques induce a connected subtree of the junction tree."""
    verts = {v for c in cliques for v in c}
    for v in verts:
        nodes = [i for i, c in enumerate(cliques) if v in c]
        inside = [(a, b) for a, b, _ in tree if v in cliques[a] and v in cliques[b]]
        if len(inside) != len(nodes) - 1:
            return False
    return True


@dataclass
class DecomposableGraph:
    n: int
    adjacency: np.ndarray
    cliques: list
    junction_tree: list
    treewidth: int
    flags: dict = field(default_factory=dict)

    @classmethod
    def from_adjacency(cls, adj, flags=None) -> "DecomposableGraph":
        adj = np.asarray(adj, dtype=bool)
        ok, width = mcs_decomposability(adj)
        if not ok:
            raise NotDecomposable("graph is not chordal")
        cliques = maximal_cliques(adj)
        return cls(adj.shape[0], adj, cliques, junction_tree_from_cliques(cliques), width,
                   dict(flags or {}))

    @classmethod
    def from_cliques(cls, n: int, cliques, flags=None) -> "DecomposableGraph":
        adj = clique_adjacency(n, cliques)
        return cls.from_adjacency(adj, flags)

    @property
    def separators(self) -> list:
        return [s for _, _, s in self.junction_tree]

    def n_components(self) -> int:
        return n_components(self.adjacency)

    def is_ktree(self, k: int) -> bool:
        n_edges = int(self.adjacency.sum()) // 2
        return (self.treewidth <= k and self.n >= k + 1
                and n_edges == k * self.n - k * (k + 1) // 2)

    def entropy(self, oracle) -> float:
        return graph_entropy(self, oracle)

    def indicators(self, space):
        """``(tau, rho)`` incidence vectors of a maximal junction tree in ``space``."""
        tau = np.zeros(space.n_cliques)
        rho = np.zeros(space.n_edges)
        idx = [space.clique_index(c) for c in self.cliques]
        tau[idx] = 1.0
        lookup = {(int(a), int(b)): e for e, (a, b) in
                  enumerate(zip(space.edge_a.tolist(), space.edge_b.tolist()))}
        for a, b, _ in self.junction_tree:
            ia, ib = sorted((idx[a], idx[b]))
            rho[lookup[(ia, ib)]] = 1.0
        return tau, rho

    def to_dict(self, cost: float | None = None) -> dict:
        return {
            "n": self.n,
            "adjacency": ["".join("1" if x else "0" for x in row) for row in self.adjacency],
            "cliques": [list(c) for c in self.cliques],
            "junction_tree": [[a, b, list(s)] for a, b, s in self.junction_tree],
            "treewidth": self.treewidth,
            "cost": cost,
            "flags": self.flags,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecomposableGraph":
        adj = np.array([[ch == "1" for ch in row] for row in d["adjacency"]], dtype=bool)
        g = cls.from_adjacency(adj, d.get("flags"))
        return g

    def dump(self, path, cost: float | None = None) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(cost), fh, indent=1)


def graph_entropy(graph: DecomposableGraph, oracle) -> float:
    """Sum of clique entropies minus sum of separator entropies."""
    return (sum(oracle(c) for c in graph.cliques)
            - sum(oracle(s) for _, _, s in graph.junction_tree))


class _Builder:
    def __init__(self, n: int, k: int):
        self.n, self.k = n, k
        self.adj = np.zeros((n, n), dtype=bool)
        self.n_edges = 0

    @property
    def target_edges(self) -> int:
        return self.k * self.n - self.k * (self.k + 1) // 2

    def complete(self) -> bool:
        return self.n_edges == self.target_edges and n_components(self.adj) == 1

    def try_add(self, clique) -> bool:
        idx = list(clique)
        block = self.adj[np.ix_(idx, idx)]
        missing = (~block).sum() - len(idx)
        if missing == 0:
            return True
        test = self.adj.copy()
        test[np.ix_(idx, idx)] = True
        np.fill_diagonal(test, False)
        ok, width = mcs_decomposability(test)
        if ok and width <= self.k:
            self.adj = test
            self.n_edges += int(missing) // 2
            return True
        return False

    def scan(self, cliques, order) -> bool:
        for c in order:
            if self.complete():
                return True
            self.try_add(cliques[c])
        return self.complete()


@dataclass
class Rounded:
    tau: np.ndarray
    graph: DecomposableGraph

    @property
    def flags(self) -> dict:
        return self.graph.flags


def greedy_decomposable(space, scores, fallback_scores=None) -> Rounded:
    """Add candidate cliques by decreasing score while the graph stays decomposable.

    One pass over ``scores`` order; if that does not end in a k-tree, further
    passes over ``fallback_scores`` order (repeated while they make progress)
    complete the graph and ``flags["fallback"]`` is set.
    """
    builder = _Builder(space.n, space.k)
    cliques = space.cliques.tolist()
    flags = {"fallback": False, "complete": True}
    if not builder.scan(cliques, greedy_order(scores).tolist()):
        if fallback_scores is not None:
            flags["fallback"] = True
            order = greedy_order(fallback_scores).tolist()
            while not builder.complete():
                before = builder.n_edges
                builder.scan(cliques, order)
                if builder.n_edges == before:
                    break
        flags["complete"] = builder.complete()
    graph = DecomposableGraph.from_adjacency(builder.adj, flags)
    tau = np.zeros(space.n_cliques)
    for c in graph.cliques:
        if len(c) == space.k + 1:
            tau[space.clique_index(c)] = 1.0
    return Rounded(tau, graph)


def round_tau(space, tau_avg, fallback_scores=None) -> Rounded:
    """Round averaged clique selections to a decomposable graph of treewidth <= k.

    ``fallback_scores`` (typically clique mutual informations) finish the
    graph if the single pass over ``tau_avg`` leaves it incomplete.
    """
    tau_avg = np.asarray(tau_avg, dtype=float)
    if tau_avg.shape != (space.n_cliques,):
        raise ValueError("tau_avg must have one entry per candidate clique")
    if (tau_avg < -1e-12).any() or (tau_avg > 1 + 1e-12).any():
        raise ValueError("tau_avg entries must lie in [0, 1]")
    return greedy_decomposable(space, tau_avg, fallback_scores)


def _keys(samples, cols, arity):
    key = np.zeros(samples.shape[0], dtype=np.int64)
    for c in cols:
        key = key * arity[c] + samples[:, c]
    return key


def loglikelihood(graph: DecomposableGraph, train, data=None, floor: float | None = None):
    """Mean log-likelihood of ``data`` under the decomposable model fit on ``train``.

    The model is the product of empirical clique marginals divided by the
    separator marginals. Unseen configurations get probability ``floor``
    (default ``1 / (10 N)``). Returns ``(mean_loglik, floor)``.
    """
    if data is None:
        data = train
    n_train = train.n_samples
    if floor is None:
        floor = 1.0 / (10 * n_train)
    arity = train.arity

    def marginal_log(cols):
        if not cols:
            return np.zeros(data.n_samples)
        ktr = _keys(train.samples, cols, arity)
        uniq, counts = np.unique(ktr, return_counts=True)
        kd = _keys(data.samples, cols, arity)
        pos = np.clip(np.searchsorted(uniq, kd), 0, len(uniq) - 1)
        p = np.where(uniq[pos] == kd, counts[pos] / n_train, 0.0)
        return np.log(np.maximum(p, floor))

    ll = np.zeros(data.n_samples)
    for c in graph.cliques:
        ll += marginal_log(list(c))
    for s in graph.separators:
        ll -= marginal_log(list(s))
    return float(ll.mean()), floor


def gaussian_loglikelihood(graph: DecomposableGraph, cov, samples=None) -> float:
    """Mean log-density under the Gaussian projected onto ``graph``.

    Without samples, returns the expectation under ``N(0, cov)``, which is
    minus the graph entropy.
    """
    from .entropy import EntropyOracle
    from .synthetic import project_covariance

    if samples is None:
        return -graph_entropy(graph, EntropyOracle.from_covariance(cov))
    proj = project_covariance(cov, graph)
    x = np.atleast_2d(samples)
    sign, logdet = np.linalg.slogdet(proj)
    quad = np.einsum("ij,ij->i", x @ np.linalg.inv(proj), x)
    return float(np.mean(-0.5 * (quad + logdet + x.shape[1] * np.log(2 * np.pi))))
