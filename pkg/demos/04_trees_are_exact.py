"""
Treewidth one: the relaxation is exact
======================================

With pairs as cliques the dual optimum sits at mu_i = H({i}) with every other
multiplier zero, and the dual value there equals the Chow-Liu entropy.
"""
from jtlearn import DualState, EntropyOracle, SpaceEntropies, build_space, chow_liu, dual_value
from jtlearn.experiment import learn
from jtlearn.rounding import graph_entropy
from jtlearn.synthetic import random_pd_covariance

n = 7
oracle = EntropyOracle.from_covariance(random_pd_covariance(n, 8, seed=3))
space = build_space(n, 1)
ent = SpaceEntropies.from_oracle(space, oracle)

tree = chow_liu(oracle, n)
print("Chow-Liu edges:", tree.cliques)
print("Chow-Liu entropy %.6f" % graph_entropy(tree, oracle))

point = DualState.zeros(space)
point.mu = ent.singleton.copy()
print("dual at mu = H(i): %.6f" % dual_value(space, ent, point).Q)

###############################################################################
# The iterative solver gets there too when the step is small.
result = learn(space, oracle, T=3000, a=0.003)
print("solver tree:", result.graph.cliques, "cost %.6f" % result.cost)
