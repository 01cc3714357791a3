"""
Supergradient ascent on a chain junction tree
=============================================

We draw a Gaussian whose conditional independences follow a chain of
triangles, run the projected supergradient method, and watch the dual bound
rise while the averaged clique and edge selections become nearly feasible.
"""
import numpy as np

from jtlearn import SpaceEntropies, build_space, make_ground_truth, round_tau, solve
from jtlearn.baselines import clique_mi
from jtlearn.rounding import graph_entropy

n, k = 9, 2
truth = make_ground_truth("chain", n, k, d=2, seed=0)
space = build_space(n, k)
oracle = truth.oracle().precompute(space)
print("true cliques:", truth.graph.cliques)
print("optimal entropy %.4f" % truth.optimal_entropy)

###############################################################################
# Two thousand iterations with the default step constant.
trace = solve(space, SpaceEntropies.from_oracle(space, oracle), T=2000)
for t in (1, 10, 100, 1000, 2000):
    print("t=%4d  Q=%.4f  violations %s" % (t, trace.Q[t - 1], np.round(trace.violations[t - 1], 3)))
print("best dual bound %.4f at iteration %d" % (trace.best_Q, trace.best_t))

###############################################################################
# Rounding the averaged cliques gives a decomposable graph whose entropy is an
# upper bound; the gap to the dual bound certifies how far we can be from optimal.
rounded = round_tau(space, trace.tau_avg, fallback_scores=clique_mi(space, oracle))
cost = graph_entropy(rounded.graph, oracle)
print("rounded cliques:", rounded.graph.cliques)
print("rounded cost %.4f, certified gap %.4f" % (cost, cost - trace.best_Q))
