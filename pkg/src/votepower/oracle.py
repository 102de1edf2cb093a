"""Independent correctness baselines: exhaustive enumeration and big-integer
dynamic programming.

These never touch modular arithmetic or transforms.  The DP rows are packed
into single Python integers (one byte-aligned field per weight sum, wide
enough that counts can never collide), so one shift-and-add per player does
a whole row update exactly; fields at or above the quota are junk that only
ever flows upward and is masked off before reading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from .game import WeightedGame, normalize


class OracleBudgetError(ValueError):
    """Instance exceeds the configured oracle size guard."""


@dataclass(eq=False)
class OracleReport:
    """Exact counts and indices from one baseline method."""

    method: str
    game: WeightedGame
    counts: tuple[int, ...]           # swing counts, or n! * SS_p pivot weights
    indices: tuple[Fraction, ...]
    degenerate: bool = False


def _subset_sums_and_sizes(weights):
    """Arrays over all 2^n subsets (bit i set = player i in), doubling trick."""
    total = sum(weights)
    if total < 2**62:
        sums = np.zeros(1, dtype=np.int64)
        sizes = np.zeros(1, dtype=np.int64)
        for w in weights:
            sums = np.concatenate([sums, sums + w])
            sizes = np.concatenate([sizes, sizes + 1])
    else:
        # weights too large for int64 sums; exact object arithmetic
        sums = np.zeros(1, dtype=object)
        sizes = np.zeros(1, dtype=np.int64)
        for w in weights:
            sums = np.concatenate([sums, sums + w])
            sizes = np.concatenate([sizes, sizes + 1])
    return sums, sizes


def brute_force_banzhaf(game: WeightedGame, max_players: int = 24) -> OracleReport:
    """Enumerate all coalitions and count swings straight from the definition."""
    n = game.n
    if n > max_players:
        raise OracleBudgetError(f"brute force limited to {max_players} players")
    q = game.quota
    sums, _ = _subset_sums_and_sizes(game.weights)
    ids = np.arange(1 << n, dtype=np.int64)
    counts = []
    for p in range(n):
        with_p = (ids >> p) & 1 == 1
        w_s = sums[with_p]
        w_rest = w_s - game.weights[p]
        counts.append(int(np.count_nonzero((w_s >= q) & (w_rest < q))))
    denom = 1 << n
    return OracleReport(
        method="brute-banzhaf", game=game,
        counts=tuple(counts),
        indices=tuple(Fraction(c, denom) for c in counts),
        degenerate=normalize(game).degenerate)


def brute_force_shapley(game: WeightedGame, mode: str = "subsets",
                        max_perm_players: int = 9,
                        max_subset_players: int = 20) -> OracleReport:
    """Pivot counts, either by walking every permutation or by the subset form
    sum over S not containing p of |S|! (n-1-|S|)! for q-w_p <= w(S) <= q-1."""
    n = game.n
    q = game.quota
    if mode == "permutations":
        if n > max_perm_players:
            raise OracleBudgetError(f"permutation walk limited to {max_perm_players} players")
        pivots = [0] * n
        for order in permutations(range(n)):
            acc = 0
            for player in order:
                before = acc
                acc += game.weights[player]
                if before < q <= acc:
                    pivots[player] += 1
                    break
    elif mode == "subsets":
        if n > max_subset_players:
            raise OracleBudgetError(f"subset enumeration limited to {max_subset_players} players")
        sums, sizes = _subset_sums_and_sizes(game.weights)
        ids = np.arange(1 << n, dtype=np.int64)
        fact = [math.factorial(k) for k in range(n + 1)]
        pivots = []
        for p in range(n):
            without_p = (ids >> p) & 1 == 0
            w_s = sums[without_p]
            sz = sizes[without_p]
            window = (w_s >= q - game.weights[p]) & (w_s <= q - 1)
            by_size = np.bincount(sz[window], minlength=n)
            pivots.append(sum(fact[k] * fact[n - 1 - k] * int(c)
                              for k, c in enumerate(by_size[:n])))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    denom = math.factorial(n)
    return OracleReport(
        method=f"brute-shapley-{mode}", game=game,
        counts=tuple(pivots),
        indices=tuple(Fraction(c, denom) for c in pivots),
        degenerate=normalize(game).degenerate)


# -- packed-row big integer DP ----------------------------------------------

def _field_bytes(n: int) -> int:
    # counts are at most 2^n, so n+1 bits per field, byte aligned
    return (n + 8) // 8


def _unpack_row(row: int, q: int, fb: int) -> list[int]:
    raw = row.to_bytes(fb * q, "little")
    return [int.from_bytes(raw[j * fb:(j + 1) * fb], "little") for j in range(q)]


def dp_banzhaf(game: WeightedGame, max_cells: int = 1 << 31) -> OracleReport:
    """O(n q) big-integer DP: subset-sum counts, per-player deconvolution,
    window sum.  Exact integers throughout, no modular arithmetic."""
    n = game.n
    q = game.quota
    norm = normalize(game)
    denom = 1 << n
    if norm.degenerate:
        return OracleReport(
            method="dp-banzhaf", game=game, counts=(0,) * n,
            indices=(Fraction(0),) * n, degenerate=True)
    if n * q > max_cells:
        raise OracleBudgetError(f"n*q = {n * q} exceeds the DP budget {max_cells}")

    fb = _field_bytes(n)
    B = fb * 8
    capped = [min(w, q) for w in game.weights]   # shift by q pushes past the window
    row = 1
    mask = (1 << (B * q)) - 1
    slack = B * q + B * q // 4                   # clamp keeps memory O(q) per row
    for w in capped:
        row += row << (B * w)
        if row.bit_length() > slack:
            row &= mask
    row &= mask
    a_hat = _unpack_row(row, q, fb)

    window_by_weight: dict[int, int] = {}
    for w, _ in norm.distinct_weights:
        a_p = a_hat[:]
        for j in range(w, q):
            a_p[j] = a_hat[j] - a_p[j - w]
        window_by_weight[w] = sum(a_p[max(q - w, 0):q])

    counts = []
    nulls = set(norm.null_players)
    for p in range(n):
        if p in nulls:
            counts.append(0)
        else:
            counts.append(window_by_weight[norm.effective_weight(p)])
    return OracleReport(
        method="dp-banzhaf", game=game,
        counts=tuple(counts),
        indices=tuple(Fraction(c, denom) for c in counts),
        degenerate=False)


def dp_shapley(game: WeightedGame, max_cells: int = 1 << 33) -> OracleReport:
    """O(n^2 q) big-integer DP over (size, weight) pairs with bivariate
    deconvolution and exact factorial combination."""
    n = game.n
    q = game.quota
    norm = normalize(game)
    nfact = math.factorial(n)
    if norm.degenerate:
        return OracleReport(
            method="dp-shapley", game=game, counts=(0,) * n,
            indices=(Fraction(0),) * n, degenerate=True)
    kmax = min(n, q + len(norm.null_players))    # sizes with any sub-quota weight sum
    if n * kmax * q > max_cells:
        raise OracleBudgetError(f"n^2*q = {n * kmax * q} exceeds the DP budget {max_cells}")

    fb = _field_bytes(n)
    B = fb * 8
    capped = [min(w, q) for w in game.weights]   # zero weights stay: shift by 0
    mask = (1 << (B * q)) - 1
    rows = [0] * kmax
    rows[0] = 1
    for w in capped:
        top = kmax - 1
        for k in range(top, 0, -1):
            if rows[k - 1]:
                rows[k] = ((rows[k] + (rows[k - 1] << (B * w)))) & mask

    fact = [math.factorial(k) for k in range(n + 1)]
    pivot_by_weight: dict[int, int] = {}
    for w in sorted(set(min(wp, q) for wp in game.weights if wp > 0)):
        lo = max(q - w, 0)
        prev = 0
        pivot = 0
        for k in range(kmax):
            a_p = (rows[k] - (prev << (B * w))) & mask
            window = _unpack_row(a_p >> (B * lo), q - lo, fb)
            pivot += fact[k] * fact[n - 1 - k] * sum(window)
            prev = a_p
        pivot_by_weight[w] = pivot

    counts = []
    for p in range(n):
        w = game.weights[p]
        counts.append(0 if w == 0 else pivot_by_weight[min(w, q)])
    return OracleReport(
        method="dp-shapley", game=game,
        counts=tuple(counts),
        indices=tuple(Fraction(c, nfact) for c in counts),
        degenerate=False)
