"""End-to-end Shapley-Shubik pipeline.

Per basis prime: build the bivariate (size, weight) generating function of
the capped weights, truncated at the quota in x and at min(effective
players, quota) in y, take running sums along x, and read one window vector
per distinct weight.  After CRT reconstruction the per-size counts are
combined with exact big-integer factorials; zero-weight players enter only
through a binomial redistribution of coalition sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import partial

import numpy as np

from . import bifps
from ._parallel import auto_parallel, map_over_primes
from .game import WeightedGame, normalize
from .ring import PrimeBasis, get_field, crt_reconstruct, select_prime_basis


@dataclass(eq=False)
class ShapleyResult:
    """Exact pivot weights (n! * SS_p), per-size window counts, indices."""

    game: WeightedGame
    pivot_weights: tuple[int, ...]
    count_vectors: tuple[tuple[int, ...], ...]   # per player, sizes 0..ñ-1, effective players only
    indices: tuple[Fraction, ...]
    float_indices: tuple[float, ...]
    degenerate: bool = False


def _zero_result(game: WeightedGame, m: int) -> ShapleyResult:
    n = game.n
    return ShapleyResult(
        game=game,
        pivot_weights=(0,) * n,
        count_vectors=((0,) * m,) * n,
        indices=(Fraction(0),) * n,
        float_indices=(0.0,) * n,
        degenerate=True)


def _chunk_window_vectors(primes, distinct, q: int, m: int) -> np.ndarray:
    """(chunk, distinct, m) window-count residues over one prime chunk."""
    fields = [get_field(p) for p in primes]
    L = bifps._log_table_rows(distinct, q, m, fields)
    fhat = bifps._bi_exp_rows(L, q, fields)
    out = np.empty((len(fields), len(distinct), m), dtype=np.int64)
    for i, field in enumerate(fields):
        g = np.cumsum(fhat[i], axis=0) % field.p
        for d, (w, _) in enumerate(distinct):
            out[i, d] = bifps.window_vector(g, w, q, m, field.p)
    return out


def compute_shapley(game: WeightedGame, basis: PrimeBasis | None = None,
                    parallel: bool | None = None) -> ShapleyResult:
    """Exact Shapley-Shubik pivot weights and indices for every player."""
    norm = normalize(game)
    n = game.n
    q = norm.quota
    m = max(1, min(norm.n_effective, q))
    if norm.degenerate:
        return _zero_result(game, m)
    if basis is None:
        basis = select_prime_basis(n, q)
    distinct = norm.distinct_weights
    if parallel is None:
        parallel = auto_parallel(len(basis) * q * m)

    chunks = [basis.primes[i:i + 2] for i in range(0, len(basis.primes), 2)]
    worker = partial(_chunk_window_vectors, distinct=distinct, q=q, m=m)
    residue_grids = map_over_primes(worker, chunks, parallel)
    residues = np.concatenate(residue_grids)     # (primes, distinct, m)

    n_null = len(norm.null_players)
    fact = [math.factorial(k) for k in range(n + 1)]
    binom_null = [math.comb(n_null, j) for j in range(n_null + 1)]

    pivot_by_bucket: list[int] = []
    counts_by_bucket: list[tuple[int, ...]] = []
    for d, (w, _) in enumerate(distinct):
        c_eff = [crt_reconstruct(residues[:, d, k], basis) for k in range(m)]
        if w < q and c_eff[0] != 0:
            raise AssertionError("empty coalition landed inside a sub-quota window")
        # fold zero-weight players into the coalition sizes, then combine
        pivot = 0
        for k_eff, c in enumerate(c_eff):
            if c == 0:
                continue
            for j, b in enumerate(binom_null):
                k = k_eff + j
                pivot += fact[k] * fact[n - 1 - k] * b * c
        pivot_by_bucket.append(pivot)
        counts_by_bucket.append(tuple(c_eff))

    nulls = set(norm.null_players)
    pivots = tuple(
        0 if i in nulls else pivot_by_bucket[norm.original_to_distinct[i]]
        for i in range(n))
    count_vectors = tuple(
        (0,) * m if i in nulls else counts_by_bucket[norm.original_to_distinct[i]]
        for i in range(n))
    nfact = fact[n]
    indices = tuple(Fraction(c, nfact) for c in pivots)
    return ShapleyResult(
        game=game,
        pivot_weights=pivots,
        count_vectors=count_vectors,
        indices=indices,
        float_indices=tuple(float(ix) for ix in indices),
        degenerate=False)
