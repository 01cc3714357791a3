"""Gaussian models that factorise exactly over a chosen junction tree.

A random unit-diagonal covariance ``S'`` is projected onto a decomposable
graph by assembling the precision matrix from clique and separator blocks::

    inv(S) = sum_C pad(inv(S'_C)) - sum_sep pad(inv(S'_sep))

The result keeps ``S'`` on the graph's edges and diagonal and has zero
precision off the graph, so its entropy splits over cliques and separators.

Random streams: ``numpy.random.default_rng(seed)`` (PCG64) draws the
``n x d_prime`` uniform matrix ``Z`` row-major in a single call and nothing
else, so a given seed yields the same ``Z`` for every value of ``d``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropy import LOG_2PI_E, EntropyOracle, NotPositiveDefinite
from .rounding import DecomposableGraph, graph_entropy

D_PRIME = 128


def random_pd_covariance(n: int, d: float, d_prime: int = D_PRIME, seed=None) -> np.ndarray:
    """``(d/d') Z Z^T + (1 - d/d') I`` with uniform ``Z``, scaled to unit diagonal."""
    if d_prime < 1:
        raise ValueError("d_prime must be >= 1")
    if not 0 < d <= d_prime:
        raise ValueError(f"d must lie in (0, {d_prime}], got {d}")
    rng = np.random.default_rng(seed)
    z = rng.uniform(0.0, 1.0, size=(n, d_prime))
    frac = d / d_prime
    sigma = frac * (z @ z.T) + (1.0 - frac) * np.eye(n)
    scale = 1.0 / np.sqrt(np.diag(sigma))
    sigma = sigma * scale[:, None] * scale[None, :]
    np.fill_diagonal(sigma, 1.0)
    return sigma


def _pad_inverse(out, sigma, idx, sign):
    idx = list(idx)
    if not idx:
        return
    block = sigma[np.ix_(idx, idx)]
    try:
        inv_chol = np.linalg.inv(np.linalg.cholesky(block))
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"block on {idx} is not positive definite") from None
    out[np.ix_(idx, idx)] += sign * (inv_chol.T @ inv_chol)


def project_covariance(sigma_prime, graph: DecomposableGraph) -> np.ndarray:
    """Covariance of the Gaussian that factorises over ``graph`` and matches clique marginals."""
    sigma_prime = np.asarray(sigma_prime, dtype=float)
    n = sigma_prime.shape[0]
    precision = np.zeros((n, n))
    for c in graph.cliques:
        _pad_inverse(precision, sigma_prime, c, +1.0)
    for s in graph.separators:
        _pad_inverse(precision, sigma_prime, s, -1.0)
    try:
        chol = np.linalg.cholesky(precision)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("assembled precision matrix is singular") from None
    inv_chol = np.linalg.inv(chol)
    sigma = inv_chol.T @ inv_chol
    return 0.5 * (sigma + sigma.T)


def chain_cliques(n: int, k: int) -> list[tuple[int, ...]]:
    if k < 1 or n < k + 2:
        raise ValueError(f"chain needs k >= 1 and n >= k + 2, got n={n}, k={k}")
    return [tuple(range(j, j + k + 1)) for j in range(n - k)]


def star_cliques(n: int, k: int) -> list[tuple[int, ...]]:
    """Hub ``{0..k-1}`` shared by every clique, each adding one more vertex."""
    if k < 1 or n < k + 2:
        raise ValueError(f"star needs k >= 1 and n >= k + 2, got n={n}, k={k}")
    hub = tuple(range(k))
    return [hub + (v,) for v in range(k, n)]


SHAPES = {"chain": chain_cliques, "star": star_cliques}


@dataclass
class GroundTruth:
    graph: DecomposableGraph
    sigma: np.ndarray
    sigma_prime: np.ndarray
    optimal_entropy: float
    params: dict

    def oracle(self) -> EntropyOracle:
        return EntropyOracle.from_covariance(self.sigma)


def make_ground_truth(shape: str, n: int, k: int, d: float, seed=None,
                      d_prime: int = D_PRIME) -> GroundTruth:
    try:
        cliques = SHAPES[shape](n, k)
    except KeyError:
        raise ValueError(f"unknown shape {shape!r}; expected one of {sorted(SHAPES)}") from None
    graph = DecomposableGraph.from_cliques(n, cliques, {"shape": shape})
    sigma_prime = random_pd_covariance(n, d, d_prime, seed)
    sigma = project_covariance(sigma_prime, graph)
    h = graph_entropy(graph, EntropyOracle.from_covariance(sigma))
    return GroundTruth(graph, sigma, sigma_prime, h,
                       {"shape": shape, "n": n, "k": k, "d": d, "d_prime": d_prime, "seed": seed})


def dense_entropy(sigma) -> float:
    """``0.5 log((2 pi e)^n det sigma)`` from a dense log-determinant."""
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        raise NotPositiveDefinite("covariance has non-positive determinant")
    return 0.5 * (sigma.shape[0] * LOG_2PI_E + logdet)


__all__ = ["random_pd_covariance", "project_covariance", "chain_cliques", "star_cliques",
           "GroundTruth", "make_ground_truth", "graph_entropy", "dense_entropy", "D_PRIME"]
