"""Bounded-treewidth decomposable model learning by dual decomposition."""
from .baselines import chow_liu, greedy_mi
from .dual import DualState, SpaceEntropies, dual_value, primal_cost, solve
from .entropy import DiscreteDataset, EntropyOracle, mutual_information
from .forest import max_weight_forest
from .hyperforest import is_hyperforest, max_weight_hyperforest
from .rounding import DecomposableGraph, mcs_decomposability, round_tau
from .space import CliqueSpace, build_space
from .synthetic import make_ground_truth

__version__ = "0.1.0"
