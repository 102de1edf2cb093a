"""End-to-end Banzhaf pipeline.

Per basis prime: build the subset-sum generating function of the capped
weights truncated at the quota, take running sums, and read one quota window
per distinct weight.  Residues are then CRT-combined into exact swing
counts; zero-weight players contribute a power-of-two factor and report
index 0 themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import partial

import numpy as np

from . import fps
from ._parallel import auto_parallel, map_over_primes
from .game import WeightedGame, normalize
from .ring import PrimeBasis, get_field, crt_reconstruct, select_prime_basis


@dataclass(eq=False)
class BanzhafResult:
    """Exact swing counts (2^n * Bz_p) and the derived indices."""

    game: WeightedGame
    swing_counts: tuple[int, ...]
    indices: tuple[Fraction, ...]
    float_indices: tuple[float, ...]
    degenerate: bool = False

    @property
    def normalized_indices(self) -> tuple[Fraction, ...] | None:
        """Swing counts over their total; None when nobody swings."""
        total = sum(self.swing_counts)
        if total == 0:
            return None
        return tuple(Fraction(c, total) for c in self.swing_counts)


def _zero_result(game: WeightedGame) -> BanzhafResult:
    n = game.n
    return BanzhafResult(
        game=game,
        swing_counts=(0,) * n,
        indices=(Fraction(0),) * n,
        float_indices=(0.0,) * n,
        degenerate=True)


def _chunk_windows(primes, distinct, q: int) -> np.ndarray:
    """Window residues for every distinct weight, over one prime chunk."""
    fields = [get_field(p) for p in primes]
    L = fps._log_one_plus_power_rows(distinct, q, fields)
    fhat = fps._exp_rows(L, q, fields)
    g = np.cumsum(fhat, axis=1) % np.array([[f.p] for f in fields], dtype=np.int64)
    out = np.empty((len(fields), len(distinct)), dtype=np.int64)
    for i, field in enumerate(fields):
        for d, (w, _) in enumerate(distinct):
            hi = fps.window_coefficient(g[i], q - 1, w, field.p)
            lo = fps.window_coefficient(g[i], q - w - 1, w, field.p)
            out[i, d] = (hi - lo) % field.p
    return out


def compute_banzhaf(game: WeightedGame, basis: PrimeBasis | None = None,
                    parallel: bool | None = None) -> BanzhafResult:
    """Exact Banzhaf swing counts and indices for every player."""
    norm = normalize(game)
    n = game.n
    if norm.degenerate:
        return _zero_result(game)
    q = norm.quota
    if basis is None:
        basis = select_prime_basis(n, q)
    distinct = norm.distinct_weights
    if parallel is None:
        parallel = auto_parallel(len(basis) * q)

    chunks = [basis.primes[i:i + 2] for i in range(0, len(basis.primes), 2)]
    worker = partial(_chunk_windows, distinct=distinct, q=q)
    residue_rows = map_over_primes(worker, chunks, parallel)
    residues = np.vstack(residue_rows)          # (primes, distinct weights)

    null_scale = 1 << len(norm.null_players)
    count_by_bucket = [
        crt_reconstruct(residues[:, d], basis) * null_scale
        for d in range(len(distinct))
    ]

    nulls = set(norm.null_players)
    counts = tuple(
        0 if i in nulls else count_by_bucket[norm.original_to_distinct[i]]
        for i in range(n))
    denom = 1 << n
    indices = tuple(Fraction(c, denom) for c in counts)
    return BanzhafResult(
        game=game,
        swing_counts=counts,
        indices=indices,
        float_indices=tuple(float(ix) for ix in indices),
        degenerate=False)
