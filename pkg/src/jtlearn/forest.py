"""Fixed-cardinality maximum-weight forests (graphic matroid greedy)."""
from __future__ import annotations

import numpy as np


class InfeasibleCount(ValueError):
    """The requested number of elements cannot be selected independently."""


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        """Merge the sets of ``x`` and ``y``; False if already merged."""
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        self.parent[y] = x
        if self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        return True


def greedy_order(weights: np.ndarray) -> np.ndarray:
    """Indices by weight descending, ties broken by ascending index."""
    return np.argsort(-np.asarray(weights, dtype=float), kind="stable")


def kruskal(n_nodes: int, u, v, weights, count: int) -> np.ndarray:
    """Select exactly ``count`` acyclic edges of maximum total weight.

    Edges are taken in :func:`greedy_order` and kept if they join two
    components; negative weights are accepted once the positive ones run out,
    because the cardinality is fixed.

    Returns a 0/1 float vector over the edges.
    """
    weights = np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(weights)):
        raise ValueError("edge weights must be finite")
    rho = np.zeros(len(weights))
    if count == 0:
        return rho
    uf = UnionFind(n_nodes)
    taken = 0
    if not isinstance(u, list):
        u = np.asarray(u).tolist()
    if not isinstance(v, list):
        v = np.asarray(v).tolist()
    for e in greedy_order(weights).tolist():
        if uf.union(u[e], v[e]):
            rho[e] = 1.0
            taken += 1
            if taken == count:
                return rho
    raise InfeasibleCount(f"only {taken} acyclic edges available, {count} requested")


def max_weight_forest(space, weights, count: int) -> np.ndarray:
    """Maximum-weight forest of ``count`` edges on the candidate-clique graph."""
    return kruskal(space.n_cliques, *space.edge_lists, weights, count)


def evaluate_q2(space, weights, count: int):
    """Forest part of the dual: ``(-max_rho w.rho, rho)``."""
    rho = max_weight_forest(space, weights, count)
    return -float(np.dot(weights, rho)), rho


def is_forest(n_nodes: int, u, v) -> bool:
    uf = UnionFind(n_nodes)
    return all(uf.union(int(a), int(b)) for a, b in zip(u, v))
