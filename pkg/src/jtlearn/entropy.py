"""Entropies of small variable subsets, in nats.

Two backends feed the same :class:`EntropyOracle` interface: plug-in
entropies of a discrete sample, and closed-form differential entropies of a
zero-mean Gaussian with known covariance. A third constructor loads a frozen
table of precomputed values.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import linalg

LOG_2PI_E = math.log(2 * math.pi * math.e)


class NotPositiveDefinite(ValueError):
    pass


@dataclass(frozen=True)
class DiscreteDataset:
    """N rows of integer codes, one column per variable."""

    samples: np.ndarray
    arity: tuple[int, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 2 or s.shape[0] < 1:
            raise ValueError("dataset must have at least one row")
        if len(self.arity) != s.shape[1]:
            raise ValueError("arity length does not match the number of columns")
        if (s < 0).any() or (s >= np.asarray(self.arity)).any():
            raise ValueError("codes must lie in [0, arity) for every column")

    @property
    def n_vars(self) -> int:
        return self.samples.shape[1]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @classmethod
    def from_array(cls, samples, arity=None, names=()) -> "DiscreteDataset":
        s = np.asarray(samples, dtype=np.int64)
        if s.ndim != 2 or s.shape[0] < 1:
            raise ValueError("dataset must have at least one row")
        if arity is None:
            arity = tuple(int(a) for a in s.max(axis=0) + 1)
        return cls(s, tuple(arity), tuple(names))

    @classmethod
    def from_csv(cls, path) -> "DiscreteDataset":
        """Read a header-bearing CSV of non-negative integer codes."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty file") from None
            rows = []
            for row in reader:
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != len(header):
                    raise ValueError(f"{path}:{reader.line_num}: expected "
                                     f"{len(header)} fields, got {len(row)}")
                try:
                    rows.append([int(c) for c in row])
                except ValueError:
                    raise ValueError(f"{path}:{reader.line_num}: non-integer code") from None
        if not rows:
            raise ValueError(f"{path}: no observations")
        data = np.array(rows, dtype=np.int64)
        if (data < 0).any():
            bad = int(np.flatnonzero((data < 0).any(axis=1))[0])
            raise ValueError(f"{path}:{bad + 2}: negative code")
        return cls.from_array(data, names=tuple(h.strip() for h in header))

    def split(self, fraction: float, seed: int = 0):
        """Shuffle rows and split into (train, test); ``fraction`` goes to train."""
        if not 0 < fraction <= 1:
            raise ValueError("split fraction must lie in (0, 1]")
        rng = np.random.default_rng(seed)
        perm = rng.permutation(self.n_samples)
        cut = max(1, int(round(fraction * self.n_samples)))
        train = DiscreteDataset(self.samples[perm[:cut]], self.arity, self.names)
        if cut == self.n_samples:
            return train, None
        return train, DiscreteDataset(self.samples[perm[cut:]], self.arity, self.names)


def empirical_entropy(data: DiscreteDataset, subset: Sequence[int]) -> float:
    """Plug-in entropy of the empirical marginal on ``subset``."""
    subset = list(subset)
    if not subset:
        return 0.0
    _, counts = np.unique(data.samples[:, subset], axis=0, return_counts=True)
    p = counts / data.n_samples
    return float(-np.sum(p * np.log(p)))


def check_covariance(cov, tol: float = 1e-10) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("covariance must be a square matrix")
    if not np.allclose(cov, cov.T, atol=tol, rtol=0):
        raise ValueError("covariance is not symmetric")
    try:
        linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError:
        raise NotPositiveDefinite("covariance is not positive definite") from None
    return cov


def gaussian_entropy(cov: np.ndarray, subset: Sequence[int]) -> float:
    """Differential entropy of the Gaussian marginal on ``subset``."""
    subset = list(subset)
    if not subset:
        return 0.0
    block = cov[np.ix_(subset, subset)]
    try:
        chol = linalg.cholesky(block, lower=True)
    except linalg.LinAlgError:
        raise NotPositiveDefinite(
            f"covariance block on {subset} is not positive definite") from None
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return 0.5 * (len(subset) * LOG_2PI_E + logdet)


class EntropyOracle:
    """Cached map from a vertex subset to its entropy.

    Construct with :meth:`from_data`, :meth:`from_covariance` or
    :meth:`from_table`. Once :meth:`freeze` is called, subsets missing from
    the cache raise ``KeyError`` instead of being computed.
    """

    def __init__(self, n: int, backend: str, fn=None, table=None):
        self.n = n
        self.backend = backend
        self._fn = fn
        self._cache: dict[tuple[int, ...], float] = {(): 0.0}
        if table:
            self._cache.update(table)
        self.frozen = False

    @classmethod
    def from_data(cls, data: DiscreteDataset) -> "EntropyOracle":
        oracle = cls(data.n_vars, "discrete", lambda s: empirical_entropy(data, s))
        oracle.data = data
        return oracle

    @classmethod
    def from_covariance(cls, cov) -> "EntropyOracle":
        cov = check_covariance(cov)
        oracle = cls(cov.shape[0], "gaussian", lambda s: gaussian_entropy(cov, s))
        oracle.cov = cov
        return oracle

    @classmethod
    def from_table(cls, entries: Iterable[dict], n: int | None = None) -> "EntropyOracle":
        table = {}
        for e in entries:
            key = tuple(sorted(int(v) for v in e["subset"]))
            table[key] = float(e["h"])
        if n is None:
            n = 1 + max((max(s) for s in table if s), default=-1)
        oracle = cls(n, "table", table=table)
        oracle.frozen = True
        return oracle

    def __call__(self, subset) -> float:
        key = tuple(sorted(int(v) for v in subset))
        try:
            return self._cache[key]
        except KeyError:
            pass
        if self.frozen or self._fn is None:
            raise KeyError(f"no entropy available for subset {key}")
        if key and not (0 <= key[0] and key[-1] < self.n):
            raise IndexError(f"subset {key} outside [0, {self.n})")
        h = self._fn(key)
        self._cache[key] = h
        return h

    def singletons(self) -> np.ndarray:
        return np.array([self((i,)) for i in range(self.n)])

    def clique_entropies(self, space) -> np.ndarray:
        return np.array([self(c) for c in space.cliques])

    def separator_entropies(self, space) -> np.ndarray:
        # Many edges share a separator; compute each distinct one once.
        uniq, inv = np.unique(space.separators, axis=0, return_inverse=True)
        values = np.array([self(s) for s in uniq])
        return values[np.asarray(inv).ravel()]

    def precompute(self, space) -> "EntropyOracle":
        """Fill the cache for singletons, all cliques and all separators."""
        self.singletons()
        self.clique_entropies(space)
        self.separator_entropies(space)
        return self

    def freeze(self) -> "EntropyOracle":
        self.frozen = True
        return self

    def mutual_information(self, subset) -> float:
        return mutual_information(self, subset)

    def to_table(self) -> list[dict]:
        return [{"subset": list(k), "h": v} for k, v in sorted(self._cache.items()) if k]

    def dump(self, path) -> None:
        save_entropy_table(self, path)


def mutual_information(oracle: EntropyOracle, subset) -> float:
    """Total correlation ``sum_i H({i}) - H(subset)``."""
    subset = list(subset)
    return sum(oracle((i,)) for i in subset) - oracle(subset)


def save_entropy_table(oracle: EntropyOracle, path) -> None:
    # 17 significant digits round-trip IEEE doubles exactly.
    parts = [f'{{"subset": {json.dumps(e["subset"])}, "h": {e["h"]:.17g}}}'
             for e in oracle.to_table()]
    with open(path, "w") as fh:
        fh.write("[\n  " + ",\n  ".join(parts) + "\n]\n")


def load_entropy_table(path, n: int | None = None) -> EntropyOracle:
    with open(path) as fh:
        return EntropyOracle.from_table(json.load(fh), n=n)
