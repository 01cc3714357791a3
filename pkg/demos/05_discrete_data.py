"""
Learning from discrete samples
==============================

Each variable is the XOR of the two before it, with a little noise. Pairs
look independent, so a tree cannot see the structure, but triangles can.
"""
import numpy as np

from jtlearn import DiscreteDataset
from jtlearn.experiment import SolverConfig, run_dataset

rng = np.random.default_rng(0)
x = np.zeros((3000, 8), dtype=int)
x[:, :2] = rng.integers(0, 2, size=(3000, 2))
for j in range(2, 8):
    x[:, j] = x[:, j - 1] ^ x[:, j - 2] ^ (rng.random(3000) < 0.05)
data = DiscreteDataset.from_array(x)

report = run_dataset(data, k=2, split=0.7, seed=0, solver=SolverConfig(T=2000, a=0.02))
print("learned cliques:", report["graph"]["cliques"])
for name in ("learned", "chowliu"):
    print("%-8s train %.4f  held-out %.4f" % (name, report[f"{name}_train_loglik"],
                                                report[f"{name}_test_loglik"]))
