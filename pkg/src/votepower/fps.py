"""Truncated formal power series over a prime field.

Series are numpy int64 vectors of residues; coeffs[i] is the x^i coefficient.
Inverse and exp run Newton doubling with working lengths that double and then
stop exactly at the requested truncation.  Log goes through derivative,
inverse, and termwise integration.

The internal kernels operate on row-stacked matrices, one row per prime with
a per-row modulus, so that a prime pair can share each packed convolution.
The public operations wrap the single-row case.
"""

from __future__ import annotations

import numpy as np

from .ring import PrimeField, NotInvertibleError, convolve, convolve_rows


class Series:
    """Truncated series: coeffs[i] = [x^i]f, all reduced mod the field prime."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs, field: PrimeField):
        arr = np.asarray(coeffs, dtype=np.int64) % field.p
        if arr.ndim != 1 or len(arr) == 0:
            raise ValueError("a series stores at least one coefficient")
        self.coeffs = arr
        self.field = field

    @property
    def trunc(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Series) and self.field.p == other.field.p
                and np.array_equal(self.coeffs, other.coeffs))

    def __repr__(self) -> str:
        head = ", ".join(str(int(c)) for c in self.coeffs[:8])
        tail = ", ..." if self.trunc > 8 else ""
        return f"Series([{head}{tail}] mod {self.field.p})"


def _check_same_field(f: Series, g: Series) -> None:
    if f.field.p != g.field.p:
        raise ValueError(f"modulus mismatch: {f.field.p} vs {g.field.p}")


def _moduli_column(fields) -> np.ndarray:
    return np.array([[f.p] for f in fields], dtype=np.int64)


def _inv_tables(fields, k: int) -> np.ndarray:
    return np.vstack([f.inverse_table(k)[:k + 1] for f in fields])


def _pad_cols(a: np.ndarray, width: int) -> np.ndarray:
    if a.shape[1] >= width:
        return a[:, :width]
    out = np.zeros((a.shape[0], width), dtype=np.int64)
    out[:, :a.shape[1]] = a
    return out


def _inverse_rows(F: np.ndarray, t: int, fields) -> np.ndarray:
    P = _moduli_column(fields)
    if np.any(F[:, 0] % P[:, 0] == 0):
        raise NotInvertibleError("series with zero constant term has no inverse")
    g = np.array([[f.inv(int(c)) for f, c in zip(fields, F[:, 0])]],
                 dtype=np.int64).T
    k = 1
    while k < t:
        # working lengths double, except the last level stops exactly at t:
        # g_new = g*(2 - f*g) = g - x^k * (g * hi(f*g mod x^{k2}))
        k2 = min(2 * k, t)
        e = convolve_rows(F[:, :k2], g, fields)[:, :k2]
        corr = _pad_cols(convolve_rows(g, e[:, k:k2], fields), k2 - k)
        g = np.hstack([g, (-corr) % P])
        k = k2
    return g[:, :t]


def _derivative_rows(F: np.ndarray, P: np.ndarray) -> np.ndarray:
    if F.shape[1] <= 1:
        return np.zeros((F.shape[0], 0), dtype=np.int64)
    idx = np.arange(1, F.shape[1], dtype=np.int64)
    return F[:, 1:] * idx % P


def _integrate_rows(D: np.ndarray, t: int, fields, P: np.ndarray) -> np.ndarray:
    out = np.zeros((D.shape[0], t), dtype=np.int64)
    n = min(D.shape[1], t - 1)
    if n > 0:
        inv = _inv_tables(fields, t - 1)
        out[:, 1:n + 1] = D[:, :n] * inv[:, 1:n + 1] % P
    return out


def _log_rows(F: np.ndarray, t: int, fields) -> np.ndarray:
    P = _moduli_column(fields)
    if np.any(F[:, 0] % P[:, 0] != 1):
        raise ValueError("log requires constant term 1")
    if t == 1:
        return np.zeros((F.shape[0], 1), dtype=np.int64)
    u = _inverse_rows(F, t - 1, fields)
    d = convolve_rows(_derivative_rows(F[:, :t], P), u, fields)[:, :t - 1]
    return _integrate_rows(d, t, fields, P)


def _exp_rows(F: np.ndarray, t: int, fields) -> np.ndarray:
    P = _moduli_column(fields)
    if np.any(F[:, 0] % P[:, 0] != 0):
        raise ValueError("exp requires constant term 0")
    r = F.shape[0]
    fa = np.zeros((r, t), dtype=np.int64)
    fa[:, :min(F.shape[1], t)] = F[:, :t]
    ones = np.ones((r, 1), dtype=np.int64)
    g = ones.copy()
    v = ones.copy()    # inverse of g, valid to half of its own length
    k = 1
    while k < t:
        k2 = min(2 * k, t)
        # lift v to full precision k against the current g
        if v.shape[1] < k:
            half = v.shape[1]
            e = convolve_rows(g, v, fields)[:, :k]
            corr = _pad_cols(convolve_rows(v, e[:, half:k], fields), k - half)
            v = np.hstack([v, (-corr) % P])
        # u = g^{-1} mod x^{k2}, one more Newton step
        e = convolve_rows(g, v, fields)
        corr = _pad_cols(convolve_rows(v, e[:, k:k2], fields), k2 - k)
        u = np.hstack([v, (-corr) % P])
        # logg = log g mod x^{k2} via g'/g, then g_new = g*(1 + f - logg)
        d = convolve_rows(_derivative_rows(g, P), u, fields)[:, :k2 - 1]
        logg = _integrate_rows(d, k2, fields, P)
        h = (fa[:, :k2] - logg) % P
        if np.any(h[:, :k]):
            raise AssertionError("exp Newton invariant violated")
        delta = _pad_cols(convolve_rows(g, h[:, k:], fields), k2 - k)
        g = np.hstack([g, delta])
        k = k2
    return g[:, :t]


def _mul_trunc(a: np.ndarray, b: np.ndarray, t: int, field: PrimeField) -> np.ndarray:
    c = convolve(a[:t], b[:t], field)[:t]
    if len(c) < t:
        c = np.concatenate([c, np.zeros(t - len(c), dtype=np.int64)])
    return c


def _inverse(f: np.ndarray, t: int, field: PrimeField) -> np.ndarray:
    return _inverse_rows(f.reshape(1, -1), t, [field])[0]


def _log(f: np.ndarray, t: int, field: PrimeField) -> np.ndarray:
    return _log_rows(f.reshape(1, -1), t, [field])[0]


def _exp(f: np.ndarray, t: int, field: PrimeField) -> np.ndarray:
    return _exp_rows(f.reshape(1, -1), t, [field])[0]


# -- public operations on Series --------------------------------------------

def series_multiply(f: Series, g: Series, t: int) -> Series:
    """First t coefficients of f*g."""
    _check_same_field(f, g)
    if t < 1:
        raise ValueError("truncation must be positive")
    return Series(_mul_trunc(f.coeffs, g.coeffs, t, f.field), f.field)


def series_inverse(f: Series, t: int) -> Series:
    """First t coefficients of 1/f; requires a unit (nonzero constant term)."""
    if t < 1:
        raise ValueError("truncation must be positive")
    return Series(_inverse(f.coeffs, t, f.field), f.field)


def series_log(f: Series, t: int) -> Series:
    """First t coefficients of log f = integral of f'/f; requires [x^0]f = 1."""
    if t < 1:
        raise ValueError("truncation must be positive")
    return Series(_log(f.coeffs, t, f.field), f.field)


def series_exp(f: Series, t: int) -> Series:
    """First t coefficients of exp f; requires [x^0]f = 0."""
    if t < 1:
        raise ValueError("truncation must be positive")
    return Series(_exp(f.coeffs, t, f.field), f.field)


def _log_one_plus_power_rows(distinct_weights, t: int, fields) -> np.ndarray:
    """Accumulate sum_s count_s * log(1 + x^s) truncated to t, one row per field.

    log(1 + x^s) expands sparsely as sum_j (-1)^(j+1) x^(s j) / j; terms with
    s j >= t vanish, so weights >= t contribute nothing.
    """
    r = len(fields)
    P = _moduli_column(fields)
    L = np.zeros((r, t), dtype=np.int64)
    inv = _inv_tables(fields, max(t - 1, 1))
    for s, count in distinct_weights:
        if s < 1:
            raise ValueError("weights must be positive (strip null players first)")
        if count < 1:
            raise ValueError("multiplicities must be positive")
        nj = (t - 1) // s
        if nj == 0:
            continue
        vals = inv[:, 1:nj + 1] * (count % P) % P
        vals[:, 1::2] = (P - vals[:, 1::2]) % P   # even j carry a minus sign
        L[:, s::s][:, :nj] = (L[:, s::s][:, :nj] + vals) % P
    return L


def binomial_product(distinct_weights, t: int, field: PrimeField) -> Series:
    """First t coefficients of prod_s (1 + x^s)^{count_s}.

    Coefficient i counts the subsets of the weight multiset summing to i,
    reduced mod p.  Computed as exp of the accumulated sparse logs.
    """
    if t < 1:
        raise ValueError("truncation must be positive")
    L = _log_one_plus_power_rows(distinct_weights, t, [field])
    return Series(_exp_rows(L, t, [field])[0], field)


def prefix_sums(f: Series) -> Series:
    """Running coefficient sums: the truncation of f/(1-x)."""
    return Series(np.cumsum(f.coeffs) % f.field.p, f.field)


def window_coefficient(g: np.ndarray, k: int, w: int, p: int) -> int:
    """[x^k] of g/(1+x^w) for a prefix-form vector g, via the alternating sum."""
    if k < 0:
        return 0
    v = g[k::-w]
    return int((int(v[0::2].sum()) - int(v[1::2].sum())) % p)


def banzhaf_window(g: Series, w: int, q: int) -> int:
    """Swing-count residue for a player of weight w.

    g must hold at least q prefix-form coefficients.  Evaluates
    [x^{q-1}](g/(1+x^w)) - [x^{q-w-1}](g/(1+x^w)) without materialising the
    quotient; each coefficient costs O(q/w) work.
    """
    if not 1 <= w <= q:
        raise ValueError("weight must lie in [1, quota]")
    if g.trunc < q:
        raise ValueError("prefix series holds fewer than q coefficients")
    p = g.field.p
    hi = window_coefficient(g.coeffs, q - 1, w, p)
    lo = window_coefficient(g.coeffs, q - w - 1, w, p)
    return (hi - lo) % p
