"""Hypergraphic matroid: independence test and fixed-cardinality greedy.

A family of hyperedges F over V is a hyperforest when every non-empty
subfamily F' covers at least ``|F'| + 1`` vertices, equivalently when
``|A| - #{G in F : G <= A} >= 1`` for every non-empty ``A <= V``.

The test is a max-flow problem on the network

    source -> hyperedge (capacity 1)
    hyperedge -> member vertex (capacity |F| + 1, i.e. unbounded)
    vertex -> sink (capacity 1)

whose max flow equals ``|F| + min_{F'} (|U F'| - |F'|)``. That only certifies
``|U F'| >= |F'|``; the extra unit of slack is obtained by closing the sink arc
of a single vertex ``w``. With ``w`` closed, a flow of value ``|F|`` exists iff
every subfamily whose union contains ``w`` covers ``|F'| + 1`` vertices. Any
violating subfamily containing a new hyperedge G contains each vertex of G, so
one flow with ``w in G`` decides whether G can be added to a hyperforest.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .forest import InfeasibleCount, greedy_order


@dataclass
class FlowNetwork:
    """Bipartite hyperedge/vertex network; node 0 is the source, 1 the sink."""

    n_vertices: int
    hyperedges: list
    closed_vertex: int | None = None

    SOURCE = 0
    SINK = 1

    def hyperedge_node(self, j: int) -> int:
        return 2 + j

    def vertex_node(self, v: int) -> int:
        return 2 + len(self.hyperedges) + v

    def arcs(self):
        """Yield ``(tail, head, capacity)`` triples."""
        big = len(self.hyperedges) + 1
        for j, he in enumerate(self.hyperedges):
            yield self.SOURCE, self.hyperedge_node(j), 1
            for v in he:
                yield self.hyperedge_node(j), self.vertex_node(v), big
        for v in range(self.n_vertices):
            if v != self.closed_vertex:
                yield self.vertex_node(v), self.SINK, 1

    def max_flow(self) -> int:
        size = 2 + len(self.hyperedges) + self.n_vertices
        tails, heads, caps = zip(*self.arcs()) if self.hyperedges else ((), (), ())
        graph = csr_matrix((np.array(caps, dtype=np.int32),
                            (np.array(tails, dtype=np.int64), np.array(heads, dtype=np.int64))),
                           shape=(size, size))
        return int(maximum_flow(graph, self.SOURCE, self.SINK).flow_value)


def _check(n_vertices: int, hyperedges) -> list[list[int]]:
    out = []
    for he in hyperedges:
        he = sorted({int(v) for v in he})
        if he and (he[0] < 0 or he[-1] >= n_vertices):
            raise ValueError(f"hyperedge {he} has a vertex outside [0, {n_vertices})")
        out.append(he)
    return out


def is_hyperforest(n_vertices: int, hyperedges) -> bool:
    """Hyperforest test by max-flow, closing one vertex at a time."""
    hyperedges = _check(n_vertices, hyperedges)
    if not hyperedges:
        return True
    if any(len(he) == 0 for he in hyperedges):
        return False
    covered = sorted({v for he in hyperedges for v in he})
    for w in covered:
        net = FlowNetwork(n_vertices, hyperedges, closed_vertex=w)
        if net.max_flow() < len(hyperedges):
            return False
    return True


def can_extend(n_vertices: int, forest, candidate) -> bool:
    """Whether ``forest + [candidate]`` is a hyperforest, given ``forest`` is one."""
    candidate = sorted(candidate)
    family = list(forest) + [candidate]
    net = FlowNetwork(n_vertices, family, closed_vertex=candidate[0])
    return net.max_flow() == len(family)


class IncrementalHyperforest:
    """Hyperforest grown one hyperedge at a time.

    Keeps, for each vertex ``w``, a matching of the accepted hyperedges into
    ``V - {w}`` (the integral max flow of the closed network), extended lazily
    by augmenting paths. Each insertion test costs one augmenting-path search.
    """

    def __init__(self, n_vertices: int):
        self.n = n_vertices
        self.edges: list[list[int]] = []
        self.covered = [False] * n_vertices
        self._owner = [dict() for _ in range(n_vertices)]
        self._synced = [0] * n_vertices

    def _augment(self, owner: dict, avoid: int, j: int, members, seen: set) -> bool:
        for u in members:
            if u == avoid or u in seen:
                continue
            seen.add(u)
            prev = owner.get(u)
            if prev is None or self._augment(owner, avoid, prev, self.edges[prev], seen):
                owner[u] = j
                return True
        return False

    def _sync(self, w: int) -> dict:
        owner = self._owner[w]
        for j in range(self._synced[w], len(self.edges)):
            ok = self._augment(owner, w, j, self.edges[j], set())
            assert ok, "accepted family lost independence"
        self._synced[w] = len(self.edges)
        return owner

    def try_add(self, members) -> bool:
        """Add the hyperedge if independence is preserved; report success."""
        members = list(members)
        if len(members) >= 2 and not all(self.covered[u] for u in members):
            # A vertex not covered yet can never sit in a violating subfamily.
            self._accept(members)
            return True
        w = members[0]
        owner = self._sync(w)
        if not self._augment(owner, w, len(self.edges), members, set()):
            return False
        self._accept(members)
        self._synced[w] = len(self.edges)
        return True

    def _accept(self, members):
        self.edges.append(members)
        for u in members:
            self.covered[u] = True


def max_weight_hyperforest(space, weights, count: int, method: str = "incremental") -> np.ndarray:
    """Maximum-weight hyperforest of exactly ``count`` candidate cliques.

    ``method="flow"`` rebuilds the flow network for every candidate; the
    default ``"incremental"`` answers the same question by augmenting paths.
    """
    weights = np.asarray(weights, dtype=float)
    if count > space.n - 1:
        raise InfeasibleCount(f"hyperforests on {space.n} vertices have at most "
                              f"{space.n - 1} hyperedges, {count} requested")
    tau = np.zeros(space.n_cliques)
    if count == 0:
        return tau
    members = space.clique_lists
    taken = 0
    if method == "incremental":
        grower = IncrementalHyperforest(space.n)
        accept = grower.try_add
    elif method == "flow":
        accepted: list = []

        def accept(c):
            if can_extend(space.n, accepted, c):
                accepted.append(c)
                return True
            return False
    else:
        raise ValueError(f"unknown method {method!r}")
    for c in greedy_order(weights).tolist():
        if accept(members[c]):
            tau[c] = 1.0
            taken += 1
            if taken == count:
                return tau
    raise InfeasibleCount(f"only {taken} independent cliques available, {count} requested")


def smallest_weights(weights, count: int) -> np.ndarray:
    """Indicator of the ``count`` smallest weights (box constraint only)."""
    tau = np.zeros(len(weights))
    tau[greedy_order(-np.asarray(weights, dtype=float))[:count]] = 1.0
    return tau


def evaluate_q1(space, weights, count: int, box: bool = False, method: str = "incremental"):
    """Clique part of the dual: ``(min_tau w.tau, tau)``.

    With ``box=True`` the hyperforest constraint is dropped and only
    ``0 <= tau <= 1`` with the cardinality constraint remains.
    """
    weights = np.asarray(weights, dtype=float)
    if box:
        tau = smallest_weights(weights, count)
    else:
        tau = max_weight_hyperforest(space, -weights, count, method=method)
    return float(np.dot(weights, tau)), tau
