import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jtlearn.entropy import (
    LOG_2PI_E,
    DiscreteDataset,
    EntropyOracle,
    NotPositiveDefinite,
    empirical_entropy,
    gaussian_entropy,
    load_entropy_table,
    mutual_information,
    save_entropy_table,
)
from jtlearn.space import build_space
from oracles import leibniz_det


def test_empirical_examples():
    data = DiscreteDataset.from_array([[0, 5, 0], [1, 5, 1], [0, 5, 0], [1, 5, 1]])
    assert empirical_entropy(data, [0]) == pytest.approx(math.log(2))
    assert empirical_entropy(data, [1]) == 0.0
    bits = DiscreteDataset.from_array([[0, 0], [0, 1], [1, 0], [1, 1]])
    assert empirical_entropy(bits, [0, 1]) == pytest.approx(2 * math.log(2))


def test_empty_dataset_rejected():
    with pytest.raises(ValueError):
        DiscreteDataset.from_array(np.zeros((0, 3), dtype=int))


def test_gaussian_examples():
    assert gaussian_entropy(np.eye(1), [0]) == pytest.approx(1.41894, abs=1e-5)
    assert gaussian_entropy(np.eye(3), [0, 1, 2]) == pytest.approx(1.5 * LOG_2PI_E)
    cov = np.array([[1.0, 0.5], [0.5, 1.0]])
    assert gaussian_entropy(cov, [0, 1]) == pytest.approx(0.5 * (2 * LOG_2PI_E + math.log(0.75)))


def test_gaussian_not_pd_names_subset():
    cov = np.array([[1.0, 1.0, 0], [1.0, 1.0, 0], [0, 0, 1.0]])
    with pytest.raises(NotPositiveDefinite, match=r"\[0, 1\]"):
        gaussian_entropy(cov, [0, 1])


def test_mutual_information_examples():
    bits = EntropyOracle.from_data(DiscreteDataset.from_array([[0, 0], [0, 1], [1, 0], [1, 1]]))
    assert mutual_information(bits, [0, 1]) == pytest.approx(0.0, abs=1e-12)
    dup = EntropyOracle.from_data(DiscreteDataset.from_array([[0, 0], [1, 1], [0, 0], [1, 1]]))
    assert mutual_information(dup, [0, 1]) == pytest.approx(math.log(2))
    g = EntropyOracle.from_covariance([[1.0, 0.5], [0.5, 1.0]])
    assert mutual_information(g, [0, 1]) == pytest.approx(-0.5 * math.log(1 - 0.25))


def test_gaussian_matches_leibniz():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.normal(size=(4, 6))
        cov = a @ a.T / 6 + 0.1 * np.eye(4)
        for subset in ([0], [1, 3], [0, 2, 3], [0, 1, 2, 3]):
            block = cov[np.ix_(subset, subset)]
            want = 0.5 * (len(subset) * LOG_2PI_E + math.log(leibniz_det(block)))
            assert abs(gaussian_entropy(cov, subset) - want) < 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 40))
def test_discrete_entropy_properties(seed, n_rows):
    rng = np.random.default_rng(seed)
    data = DiscreteDataset.from_array(rng.integers(0, 3, size=(n_rows, 5)), arity=(3,) * 5)
    oracle = EntropyOracle.from_data(data)
    s, t = [0, 1], [2, 4]
    assert oracle(()) == 0.0
    for subset in ([0], s, t, s + t):
        h = oracle(subset)
        assert -1e-12 <= h <= sum(oracle([i]) for i in subset) + 1e-12
    assert oracle(s + t) <= oracle(s) + oracle(t) + 1e-12
    assert oracle([0]) <= oracle(s) + 1e-12 <= oracle(s + [2]) + 2e-12
    assert oracle(s) == oracle(s)  # cached, bit identical


def test_cache_and_freeze():
    oracle = EntropyOracle.from_covariance(np.eye(4))
    space = build_space(4, 1)
    oracle.precompute(space).freeze()
    assert oracle((1, 0)) == oracle((0, 1))
    with pytest.raises(KeyError):
        oracle((0, 1, 2))


def test_table_roundtrip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    a = rng.normal(size=(5, 9))
    oracle = EntropyOracle.from_covariance(a @ a.T / 9 + 0.2 * np.eye(5))
    space = build_space(5, 2)
    oracle.precompute(space)
    path = tmp_path / "h.json"
    save_entropy_table(oracle, path)
    back = load_entropy_table(path)
    assert back.n == 5
    for entry in oracle.to_table():
        assert back(entry["subset"]) == entry["h"]


def test_csv_ingestion(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,b,c\n0,1,2\n1,1,0\n")
    data = DiscreteDataset.from_csv(path)
    assert data.n_samples == 2 and data.arity == (2, 2, 3) and data.names == ("a", "b", "c")
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n0,1\n1,x\n")
    with pytest.raises(ValueError, match=":3:"):
        DiscreteDataset.from_csv(bad)
    short = tmp_path / "short.csv"
    short.write_text("a,b\n0,1\n1\n")
    with pytest.raises(ValueError, match=":3:"):
        DiscreteDataset.from_csv(short)


def test_split():
    data = DiscreteDataset.from_array(np.arange(20).reshape(10, 2) % 3)
    train, test = data.split(0.7, seed=1)
    assert train.n_samples == 7 and test.n_samples == 3
    assert data.split(1.0)[1] is None
