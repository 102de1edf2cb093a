"""Exact Banzhaf and Shapley-Shubik power indices for weighted majority games.

The fast pipelines build subset-sum generating functions with truncated
formal power series over word-sized prime fields (Newton-iteration exp of a
sparse log accumulation), extract per-weight quota windows by sparse
deconvolution, and recover exact counts through the Chinese Remainder
Theorem.  Brute-force and big-integer dynamic-programming oracles provide
independent baselines.
"""

from .game import (
    InvalidGameError,
    NormalizedGame,
    WeightedGame,
    normalize,
    random_game,
)
from .ring import (
    PrimeBasis,
    PrimeField,
    UnsupportedSizeError,
    crt_reconstruct,
    select_prime_basis,
)
from .banzhaf import BanzhafResult, compute_banzhaf
from .shapley import ShapleyResult, compute_shapley
from .oracle import (
    OracleBudgetError,
    OracleReport,
    brute_force_banzhaf,
    brute_force_shapley,
    dp_banzhaf,
    dp_shapley,
)

__all__ = [
    "InvalidGameError",
    "NormalizedGame",
    "WeightedGame",
    "normalize",
    "random_game",
    "PrimeBasis",
    "PrimeField",
    "UnsupportedSizeError",
    "crt_reconstruct",
    "select_prime_basis",
    "BanzhafResult",
    "compute_banzhaf",
    "ShapleyResult",
    "compute_shapley",
    "OracleBudgetError",
    "OracleReport",
    "brute_force_banzhaf",
    "brute_force_shapley",
    "dp_banzhaf",
    "dp_shapley",
]

__version__ = "0.1.0"
