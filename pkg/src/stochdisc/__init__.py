"""Online discrepancy minimization for stochastic arrivals.

A cosh-potential greedy balances signed counts on a complete m-ary tree;
embedding [0, 1] into the tree's leaves gives online interval discrepancy,
two trees give stripe discrepancy in the unit square, and the stripe
coloring drives two-player online envy minimization.
"""

from .adversary import (
    PrecisionExhausted,
    build_oblivious_script,
    run_adaptive_game,
    run_oblivious_trials,
    stochastic_lowerbound_probe,
)
from .algorithms import AlternatingColorer, ConstantColorer, PotentialColorer, RandomColorer
from .envy import (
    cardinal_envy,
    ordinal_envy,
    ordinal_envy_cancellation,
    ordinal_envy_prefix,
    run_online_envy,
    worst_consistent_valuation,
)
from .interval import (
    EmbeddingParams,
    RunningDiscrepancyTracker,
    Transcript,
    derive_params,
    embed_point,
    interval_discrepancy_bruteforce,
    run_online_interval,
)
from .stripe import run_online_stripe
from .tree import OVERFLOW, BalancedTree, TreeShape, default_lambda, new_tree

__version__ = "0.1.0"

__all__ = [
    "OVERFLOW",
    "AlternatingColorer",
    "BalancedTree",
    "ConstantColorer",
    "EmbeddingParams",
    "PotentialColorer",
    "PrecisionExhausted",
    "RandomColorer",
    "RunningDiscrepancyTracker",
    "Transcript",
    "TreeShape",
    "build_oblivious_script",
    "cardinal_envy",
    "default_lambda",
    "derive_params",
    "embed_point",
    "interval_discrepancy_bruteforce",
    "new_tree",
    "ordinal_envy",
    "ordinal_envy_cancellation",
    "ordinal_envy_prefix",
    "run_adaptive_game",
    "run_oblivious_trials",
    "run_online_envy",
    "run_online_interval",
    "run_online_stripe",
    "stochastic_lowerbound_probe",
    "worst_consistent_valuation",
]
