"""Candidate cliques and junction-tree edges for treewidth-k structure search.

A :class:`CliqueSpace` materialises every (k+1)-subset of ``{0, ..., n-1}``
(the candidate cliques) and every pair of candidate cliques sharing exactly
``k`` vertices (the candidate junction-tree edges), together with the index
arrays the solver needs to move between vertices, cliques and edges.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb

import numpy as np

DEFAULT_EDGE_LIMIT = 10**8


class SpaceTooLarge(ValueError):
    """Raised when the candidate edge set would exceed the configured cap."""


@dataclass(frozen=True)
class CliqueSpace:
    """Dense, lexicographically indexed candidate cliques and edges.

    Attributes
    ----------
    n, k : int
        Number of vertices and treewidth bound.
    cliques : ndarray, shape (r, k+1)
        Sorted vertex lists, rows in lexicographic order.
    edge_a, edge_b : ndarray, shape (m,)
        Clique indices of each edge, ``edge_a < edge_b``.
    separators : ndarray, shape (m, k)
        Sorted intersection of the two cliques of each edge.
    """

    n: int
    k: int
    cliques: np.ndarray
    edge_a: np.ndarray
    edge_b: np.ndarray
    separators: np.ndarray
    _index: dict = field(repr=False, compare=False)
    _incident_ptr: np.ndarray = field(repr=False, compare=False)
    _incident_idx: np.ndarray = field(repr=False, compare=False)

    @property
    def n_cliques(self) -> int:
        return self.cliques.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edge_a.shape[0]

    # Plain-list copies for the pure-Python greedy loops.

    @cached_property
    def clique_lists(self) -> list:
        return self.cliques.tolist()

    @cached_property
    def edge_lists(self) -> tuple:
        return self.edge_a.tolist(), self.edge_b.tolist()

    @cached_property
    def clique_incidence(self) -> np.ndarray:
        """Dense ``(r, n)`` 0/1 matrix, ``[C, i] = 1`` iff ``i`` is in ``C``."""
        out = np.zeros((self.n_cliques, self.n))
        np.put_along_axis(out, self.cliques, 1.0, axis=1)
        return out

    @cached_property
    def separator_incidence(self) -> np.ndarray:
        """Dense ``(m, n)`` 0/1 matrix of separator membership."""
        out = np.zeros((self.n_edges, self.n))
        np.put_along_axis(out, self.separators, 1.0, axis=1)
        return out

    def clique_index(self, vertices) -> int:
        """Index of the clique with the given vertex set."""
        key = tuple(sorted(int(v) for v in vertices))
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(f"{key} is not a candidate clique") from None

    def clique(self, c: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.cliques[c])

    def incident_edges(self, c: int) -> np.ndarray:
        """Edge indices having clique ``c`` as either endpoint, ascending."""
        if not 0 <= c < self.n_cliques:
            raise IndexError(f"clique index {c} out of range [0, {self.n_cliques})")
        return self._incident_idx[self._incident_ptr[c]:self._incident_ptr[c + 1]]

    def cliques_containing(self, i: int) -> np.ndarray:
        if not 0 <= i < self.n:
            raise IndexError(f"vertex {i} out of range [0, {self.n})")
        return np.flatnonzero((self.cliques == i).any(axis=1))

    def edges_separating(self, i: int) -> np.ndarray:
        """Edges whose separator contains vertex ``i``."""
        if not 0 <= i < self.n:
            raise IndexError(f"vertex {i} out of range [0, {self.n})")
        return np.flatnonzero((self.separators == i).any(axis=1))

    # Vectorised incidence products used inside the solver loop.

    def vertex_cover(self, tau: np.ndarray) -> np.ndarray:
        """``sum_{C containing i} tau(C)`` for every vertex ``i``."""
        return tau @ self.clique_incidence

    def separator_cover(self, rho: np.ndarray) -> np.ndarray:
        """``sum_{(C,D) : i in C & D} rho(C,D)`` for every vertex ``i``."""
        return rho @ self.separator_incidence

    def clique_degree(self, rho: np.ndarray) -> np.ndarray:
        """``sum_{(C,D) in E} rho(C,D)`` for every clique ``C``."""
        r = self.n_cliques
        return (np.bincount(self.edge_a, weights=rho, minlength=r)
                + np.bincount(self.edge_b, weights=rho, minlength=r))


def n_candidate_edges(n: int, k: int) -> int:
    return comb(n, k + 2) * comb(k + 2, 2)


def build_space(n: int, k: int, max_edges: int = DEFAULT_EDGE_LIMIT) -> CliqueSpace:
    """Enumerate all candidate cliques and junction-tree edges.

    Raises
    ------
    ValueError
        If ``k < 1`` or ``n < k + 2``.
    SpaceTooLarge
        If the number of candidate edges exceeds ``max_edges``.
    """
    if k < 1:
        raise ValueError(f"treewidth bound must be >= 1, got {k}")
    if n < k + 2:
        raise ValueError(f"need n >= k + 2 vertices, got n={n}, k={k}")
    m = n_candidate_edges(n, k)
    if m > max_edges:
        raise SpaceTooLarge(
            f"n={n}, k={k} gives {m} candidate edges, above the limit of {max_edges}")

    cliques = np.array(list(itertools.combinations(range(n), k + 1)), dtype=np.int64)
    index = {tuple(int(v) for v in row): i for i, row in enumerate(cliques)}

    pairs = []
    for union in itertools.combinations(range(n), k + 2):
        # Dropping x gives one clique, dropping y the other; the separator drops both.
        for x, y in itertools.combinations(union, 2):
            ca = index[tuple(v for v in union if v != x)]
            cb = index[tuple(v for v in union if v != y)]
            sep = tuple(v for v in union if v != x and v != y)
            pairs.append((min(ca, cb), max(ca, cb), sep))
    pairs.sort()
    edge_a = np.array([p[0] for p in pairs], dtype=np.int64)
    edge_b = np.array([p[1] for p in pairs], dtype=np.int64)
    separators = np.array([p[2] for p in pairs], dtype=np.int64).reshape(len(pairs), k)

    ends = np.concatenate([edge_a, edge_b])
    eids = np.concatenate([np.arange(m), np.arange(m)])
    order = np.lexsort((eids, ends))
    incident_idx = eids[order]
    incident_ptr = np.zeros(len(cliques) + 1, dtype=np.int64)
    np.cumsum(np.bincount(ends, minlength=len(cliques)), out=incident_ptr[1:])

    for arr in (cliques, edge_a, edge_b, separators, incident_idx, incident_ptr):
        arr.setflags(write=False)
    return CliqueSpace(n, k, cliques, edge_a, edge_b, separators,
                       index, incident_ptr, incident_idx)
