"""Reference structures: Chow-Liu trees and greedy mutual-information cliques."""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .forest import kruskal
from .rounding import DecomposableGraph, greedy_decomposable


def pairwise_mi(oracle, n: int):
    pairs = list(combinations(range(n), 2))
    h = [oracle((i,)) for i in range(n)]
    mi = np.array([h[i] + h[j] - oracle((i, j)) for i, j in pairs])
    return pairs, mi


def chow_liu(oracle, n: int) -> DecomposableGraph:
    """Maximum mutual-information spanning tree."""
    if n < 2:
        raise ValueError("Chow-Liu needs at least two variables")
    pairs, mi = pairwise_mi(oracle, n)
    u, v = zip(*pairs)
    chosen = kruskal(n, u, v, mi, n - 1)
    tree = [pairs[e] for e in np.flatnonzero(chosen)]
    return DecomposableGraph.from_cliques(n, tree, {"method": "chowliu"})


def clique_mi(space, oracle) -> np.ndarray:
    """Total correlation ``sum_i H({i}) - H(C)`` of every candidate clique."""
    h = oracle.singletons()
    return h[space.cliques].sum(axis=1) - oracle.clique_entropies(space)


def greedy_mi(space, oracle) -> DecomposableGraph:
    """Add cliques by decreasing mutual information while decomposable, treewidth <= k."""
    scores = clique_mi(space, oracle)
    out = greedy_decomposable(space, scores, fallback_scores=scores)
    out.graph.flags["method"] = "greedy"
    return out.graph
