import json

import numpy as np
import pytest

from jtlearn.cli import main


@pytest.fixture(scope="module")
def generated(tmp_path_factory):
    out = tmp_path_factory.mktemp("gen")
    assert main(["gen", "--n", "6", "--treewidth", "2", "--d", "8", "--seeds", "1",
                 "--out", str(out)]) == 0
    return out


def test_gen_outputs(generated):
    cov = np.loadtxt(generated / "covariance.txt")
    assert cov.shape == (6, 6)
    graph = json.loads((generated / "graph.json").read_text())
    assert graph["treewidth"] == 2 and len(graph["cliques"]) == 4
    table = json.loads((generated / "entropies.json").read_text())
    assert table


def test_learn_round_eval(generated, tmp_path, capsys):
    out = tmp_path / "learn"
    assert main(["learn", "--cov", str(generated / "covariance.txt"), "--treewidth", "2",
                 "--iters", "200", "--out", str(out)]) == 0
    lines = (out / "trace.jsonl").read_text().splitlines()
    assert len(lines) == 200
    learned = json.loads((out / "graph.json").read_text())
    assert learned["treewidth"] <= 2
    rounded = tmp_path / "r.json"
    assert main(["round", "--tau", str(out / "tau_avg.json"), "--n", "6", "--treewidth", "2",
                 "--entropies", str(generated / "entropies.json"), "--out", str(rounded)]) == 0
    again = json.loads(rounded.read_text())
    assert again["cliques"] == learned["cliques"]
    assert again["cost"] == pytest.approx(learned["cost"])
    capsys.readouterr()
    assert main(["eval", "--graph", str(rounded), "--cov", str(generated / "covariance.txt")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["expected_loglik"] == pytest.approx(-learned["cost"])


def test_learn_reruns_identical(generated, tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["learn", "--entropies", str(generated / "entropies.json"), "--n", "6",
                     "--treewidth", "2", "--iters", "100", "--out", str(out)]) == 0
        outs.append(out)
    for f in ("trace.jsonl", "graph.json", "tau_avg.json"):
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()


def test_k1_learn_matches_chow_liu(generated, tmp_path):
    cov = str(generated / "covariance.txt")
    # Small steps keep the averaged trees on the optimal face; see README.
    assert main(["learn", "--cov", cov, "--treewidth", "1", "--iters", "2000",
                 "--step-a", "0.003", "--out", str(tmp_path / "l")]) == 0
    assert main(["baseline", "--cov", cov, "--method", "chowliu",
                 "--out", str(tmp_path / "c.json")]) == 0
    learned = json.loads((tmp_path / "l" / "graph.json").read_text())
    tree = json.loads((tmp_path / "c.json").read_text())
    assert learned["adjacency"] == tree["adjacency"]
    assert learned["cost"] == pytest.approx(tree["cost"], abs=1e-9)


def test_discrete_learn_and_eval(tmp_path, capsys):
    rng = np.random.default_rng(0)
    x = rng.integers(0, 2, size=(300, 5))
    x[:, 2] = x[:, 0] ^ x[:, 1]
    csv = tmp_path / "d.csv"
    np.savetxt(csv, x, fmt="%d", delimiter=",", header="a,b,c,d,e", comments="")
    assert main(["learn", "--data", str(csv), "--treewidth", "2", "--iters", "200",
                 "--out", str(tmp_path / "l")]) == 0
    capsys.readouterr()
    assert main(["eval", "--graph", str(tmp_path / "l" / "graph.json"), "--data", str(csv),
                 "--split", "0.7"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert {"train_loglik", "test_loglik", "floor"} <= set(report)


def test_experiment_small(tmp_path, capsys):
    args = ["experiment", "--shape", "star", "--n", "6", "--d", "4", "--seeds", "2",
            "--iters", "100", "--scale"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "results.json").read_bytes()
    assert a == (tmp_path / "b" / "results.json").read_bytes()
    rows = json.loads(a)["rows"]
    assert len(rows) == 1 and len(rows[0]["per_seed"]) == 2
    assert "delta_dual" in capsys.readouterr().out


def test_exit_codes(generated, tmp_path):
    cov = str(generated / "covariance.txt")
    assert main(["learn", "--cov", cov, "--treewidth", "9", "--out", str(tmp_path)]) == 2
    assert main(["learn", "--treewidth", "2", "--out", str(tmp_path)]) == 2
    assert main(["learn", "--cov", cov, "--treewidth", "2", "--step-a", "-1",
                 "--out", str(tmp_path)]) == 2
    assert main(["gen", "--n", "400", "--treewidth", "6", "--out", str(tmp_path)]) == 4
    bad = tmp_path / "bad.txt"
    np.savetxt(bad, np.ones((4, 4)))
    assert main(["learn", "--cov", str(bad), "--treewidth", "2", "--out", str(tmp_path)]) == 3
    assert main(["nosuch"]) == 2
