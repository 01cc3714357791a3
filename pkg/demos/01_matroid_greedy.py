"""
Forests, hyperforests and the greedy algorithm
==============================================

The dual function splits into two combinatorial subproblems. Both are
maximum-weight bases of a matroid, so sorting by weight and keeping what
stays independent is optimal. Here we look at the two independence tests
and check the greedy answer against exhaustive search on a small instance.
"""
import itertools

import numpy as np

from jtlearn import build_space
from jtlearn.forest import kruskal
from jtlearn.hyperforest import is_hyperforest, max_weight_hyperforest

# Five vertices, treewidth 2: the candidate cliques are the ten triples.
space = build_space(5, 2)
print(space.n_cliques, "candidate cliques,", space.n_edges, "candidate junction-tree edges")

###############################################################################
# A hyperforest never packs more hyperedges into a vertex set A than |A| - 1.
# Two triangles sharing a vertex are fine; all four triples of {0,1,2,3} are not.
print(is_hyperforest(5, [(0, 1, 2), (2, 3, 4)]))
print(is_hyperforest(4, list(itertools.combinations(range(4), 3))))

###############################################################################
# Greedy versus brute force for three cliques of maximum total weight.
rng = np.random.default_rng(0)
w = rng.normal(size=space.n_cliques)
tau = max_weight_hyperforest(space, w, 3)
cliques = space.cliques.tolist()
best = max(sum(w[c] for c in combo)
           for combo in itertools.combinations(range(space.n_cliques), 3)
           if is_hyperforest(5, [cliques[c] for c in combo]))
print("greedy", w @ tau, "exhaustive", best)

###############################################################################
# The edge side is an ordinary forest on the graph whose nodes are cliques.
# Kruskal keeps exactly the requested number of edges, even negative ones.
w_edges = rng.normal(size=space.n_edges)
rho = kruskal(space.n_cliques, space.edge_a, space.edge_b, w_edges, 2)
print("chosen edges:", [(tuple(space.clique(space.edge_a[e])), tuple(space.clique(space.edge_b[e])))
                        for e in np.flatnonzero(rho)])
