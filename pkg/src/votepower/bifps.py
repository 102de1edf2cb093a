"""Bivariate kernel: series in x whose coefficients live in F_p[y]/(y^m).

Grids are numpy int64 arrays of shape (x_len, m): coeffs[i][j] = [y^j x^i]f.
Products pack both operands into one variable by the substitution
y = x^stride; a stride of at least (x-degree bound of the product plus one)
makes the packing collision-free, so one exact univariate convolution
recovers the bivariate product.  Inverse, log, and exp run the same Newton
doubling as the univariate kernel, with constant-in-x terms handled inside
the nilpotent quotient ring by finite sums.

Internally grids are row-stacked (one row per prime, shape (r, x_len, m)) so
that a prime pair shares each packed multiplication, exactly as in fps.
"""

from __future__ import annotations

import numpy as np
from gmpy2 import mpz

from . import fps
from .ring import (
    PrimeField,
    NotInvertibleError,
    UnsupportedSizeError,
    _fold_pieces_mod,
    _unpack_pieces,
    convolve,
    field_width,
)


class BiSeries:
    """Truncated-in-both-variables series over a prime field."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs, field: PrimeField):
        arr = np.asarray(coeffs, dtype=np.int64) % field.p
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("a bivariate series stores a non-empty grid")
        self.coeffs = arr
        self.field = field

    @property
    def x_trunc(self) -> int:
        return self.coeffs.shape[0]

    @property
    def y_trunc(self) -> int:
        return self.coeffs.shape[1]

    def __eq__(self, other) -> bool:
        return (isinstance(other, BiSeries) and self.field.p == other.field.p
                and np.array_equal(self.coeffs, other.coeffs))

    def __repr__(self) -> str:
        return f"BiSeries({self.x_trunc} x {self.y_trunc} grid mod {self.field.p})"


def _check_compatible(f: BiSeries, g: BiSeries) -> None:
    if f.field.p != g.field.p:
        raise ValueError(f"modulus mismatch: {f.field.p} vs {g.field.p}")
    if f.y_trunc != g.y_trunc:
        raise ValueError(f"y-truncation mismatch: {f.y_trunc} vs {g.y_trunc}")


def _moduli_cube(fields) -> np.ndarray:
    return np.array([f.p for f in fields], dtype=np.int64).reshape(-1, 1, 1)


def _pack_grid(a: np.ndarray, stride: int) -> np.ndarray:
    """Kronecker packing: entry (i, j) goes to position i + stride*j."""
    x_len, m = a.shape
    buf = np.zeros((m, stride), dtype=np.int64)
    buf[:, :x_len] = a.T
    return buf.reshape(-1)


def _pack_grid_mpz(a: np.ndarray, stride: int, width: int) -> mpz:
    """Grid straight into packed little-endian field bytes."""
    x_len, m = a.shape
    buf = np.zeros((m, stride, width), dtype=np.uint8)
    nb = min(8, width)
    buf[:, :x_len, :nb] = (
        a.T.astype('<u8', order='C').view(np.uint8).reshape(m, x_len, 8)[:, :, :nb])
    return mpz.from_bytes(buf.tobytes(), 'little')


def _bi_convolve_rows(A: np.ndarray, B: np.ndarray, x_keep: int, fields,
                      stride: int | None = None) -> np.ndarray:
    """Row-stacked exact grid product, truncated to x_keep rows, m columns.

    Packed through one big-integer multiplication per prime pair; only the
    fields below y-degree m are unpacked.  Small operands fall back to the
    generic convolution dispatcher on packed vectors.
    """
    r, xa, m = A.shape
    xb = B.shape[1]
    out = np.zeros((r, x_keep, m), dtype=np.int64)
    if xa == 0 or xb == 0:
        return out
    if stride is None:
        stride = xa + xb - 1           # product x-degrees stay below this
    rows = min(x_keep, stride)
    if stride * m <= 4096:
        for i in range(r):
            c = convolve(_pack_grid(A[i], stride), _pack_grid(B[i], stride), fields[i])
            full = stride * (2 * m - 1)
            if len(c) < full:
                c = np.concatenate([c, np.zeros(full - len(c), dtype=np.int64)])
            out[i, :rows, :] = c[:full].reshape(2 * m - 1, stride)[:m, :rows].T
        return out
    terms_bound = min(xa, xb) * m
    if terms_bound > (1 << 26):
        raise UnsupportedSizeError("bivariate operands too long for packed convolution")
    total = 2 * stride * m - 1                     # fields in the full product
    keep = stride * (m - 1) + rows                 # prefix covering y < m, x < rows
    grid_len = stride * m
    width = field_width(31, terms_bound)
    for i in range(r):
        z = _pack_grid_mpz(A[i], stride, width) * _pack_grid_mpz(B[i], stride, width)
        flat = _fold_pieces_mod(_unpack_pieces(z, total, width, keep), fields[i].p)
        if len(flat) < grid_len:
            flat = np.concatenate(
                [flat, np.zeros(grid_len - len(flat), dtype=np.int64)])
        out[i, :rows, :] = flat.reshape(m, stride)[:, :rows].T
    return out


def _x_derivative_rows(F: np.ndarray, P: np.ndarray) -> np.ndarray:
    if F.shape[1] <= 1:
        return np.zeros((F.shape[0], 0, F.shape[2]), dtype=np.int64)
    idx = np.arange(1, F.shape[1], dtype=np.int64)
    return F[:, 1:, :] * idx[None, :, None] % P


def _x_integrate_rows(D: np.ndarray, t: int, fields, P: np.ndarray) -> np.ndarray:
    r, _, m = D.shape
    out = np.zeros((r, t, m), dtype=np.int64)
    rows = min(D.shape[1], t - 1)
    if rows > 0:
        inv = fps._inv_tables(fields, t - 1)
        out[:, 1:rows + 1, :] = D[:, :rows, :] * inv[:, 1:rows + 1, None] % P
    return out


def _const_log(a0: np.ndarray, field: PrimeField) -> np.ndarray:
    """log of a y-polynomial with constant term 1, by the finite sum
    -sum_{i<m} (1-a0)^i / i (every y multiple is nilpotent)."""
    p = field.p
    m = len(a0)
    u = (-a0) % p
    u[0] = (1 + u[0]) % p
    out = np.zeros(m, dtype=np.int64)
    power = np.zeros(m, dtype=np.int64)
    power[0] = 1
    inv = field.inverse_table(max(m - 1, 1))
    for i in range(1, m):
        power = fps._mul_trunc(power, u, m, field)
        if not np.any(power):
            break
        out = (out - power * inv[i]) % p
    return out


def _const_exp(a0: np.ndarray, field: PrimeField) -> np.ndarray:
    """exp of a nilpotent y-polynomial by the finite sum of a0^i / i!."""
    p = field.p
    m = len(a0)
    out = np.zeros(m, dtype=np.int64)
    out[0] = 1
    power = out.copy()
    inv = field.inverse_table(max(m - 1, 1))
    fact_inv = 1
    for i in range(1, m):
        power = fps._mul_trunc(power, a0, m, field)
        if not np.any(power):
            break
        fact_inv = fact_inv * inv[i] % p
        out = (out + power * fact_inv) % p
    return out


def _bi_inverse_rows(F: np.ndarray, t: int, fields) -> np.ndarray:
    P = _moduli_cube(fields)
    r, _, m = F.shape
    if np.any(F[:, 0, 0] % P[:, 0, 0] == 0):
        raise NotInvertibleError(
            "constant coefficient is not a unit of the y quotient ring")
    g = np.stack([fps._inverse(F[i, 0], m, fields[i]) for i in range(r)])[:, None, :]
    k = 1
    while k < t:
        k2 = min(2 * k, t)
        e = _bi_convolve_rows(F[:, :k2], g, k2, fields)
        corr = _bi_convolve_rows(g, e[:, k:k2], k2 - k, fields)
        g = np.concatenate([g, (-corr) % P], axis=1)
        k = k2
    return g[:, :t]


def _bi_log_rows(F: np.ndarray, t: int, fields) -> np.ndarray:
    P = _moduli_cube(fields)
    if np.any(F[:, 0, 0] % P[:, 0, 0] != 1):
        raise ValueError("log needs [y^0 x^0]f = 1 so that [x^0]f - 1 is nilpotent")
    r, _, m = F.shape
    const = np.stack([_const_log(F[i, 0], fields[i]) for i in range(r)])
    if t == 1:
        return const[:, None, :]
    u = _bi_inverse_rows(F, t - 1, fields)
    d = _bi_convolve_rows(_x_derivative_rows(F[:, :t], P), u, t - 1, fields)
    out = _x_integrate_rows(d, t, fields, P)
    out[:, 0, :] = const
    return out


def _bi_exp_rows(F: np.ndarray, t: int, fields) -> np.ndarray:
    P = _moduli_cube(fields)
    if np.any(F[:, 0, 0] % P[:, 0, 0] != 0):
        raise ValueError("exp needs [y^0 x^0]f = 0 so that [x^0]f is nilpotent")
    r, _, m = F.shape
    fa = np.zeros((r, t, m), dtype=np.int64)
    rows = min(F.shape[1], t)
    fa[:, :rows] = F[:, :rows]
    g = np.stack([_const_exp(fa[i, 0], fields[i]) for i in range(r)])[:, None, :]
    v = np.stack([fps._inverse(g[i, 0], m, fields[i]) for i in range(r)])[:, None, :]
    k = 1
    while k < t:
        k2 = min(2 * k, t)
        # lift the inverse companion to x-precision k against the current g
        if v.shape[1] < k:
            half = v.shape[1]
            e = _bi_convolve_rows(g, v, k, fields)
            corr = _bi_convolve_rows(v, e[:, half:k], k - half, fields)
            v = np.concatenate([v, (-corr) % P], axis=1)
        # u = g^{-1} mod x^{k2}
        e = _bi_convolve_rows(g, v, k2, fields)
        corr = _bi_convolve_rows(v, e[:, k:k2], k2 - k, fields)
        u = np.concatenate([v, (-corr) % P], axis=1)
        # log g mod x^{k2}: integral of g'/g, constant slice is f's own
        d = _bi_convolve_rows(_x_derivative_rows(g, P), u, k2 - 1, fields)
        logg = _x_integrate_rows(d, k2, fields, P)
        logg[:, 0, :] = fa[:, 0, :]
        h = (fa[:, :k2] - logg) % P
        if np.any(h[:, :k]):
            raise AssertionError("bivariate exp Newton invariant violated")
        delta = _bi_convolve_rows(g, h[:, k:], k2 - k, fields)
        g = np.concatenate([g, delta], axis=1)
        k = k2
    return g[:, :t]


def _bi_inverse(f: np.ndarray, t: int, field: PrimeField) -> np.ndarray:
    return _bi_inverse_rows(f[None, :, :], t, [field])[0]


def _bi_log(f: np.ndarray, t: int, field: PrimeField) -> np.ndarray:
    return _bi_log_rows(f[None, :, :], t, [field])[0]


def _bi_exp(f: np.ndarray, t: int, field: PrimeField) -> np.ndarray:
    return _bi_exp_rows(f[None, :, :], t, [field])[0]


# -- public operations -------------------------------------------------------

def bi_multiply(f: BiSeries, g: BiSeries, t: int) -> BiSeries:
    """Product truncated to x-degree < t, y-degree < m, via Kronecker packing
    with the fixed stride 2t-1 (both operands clipped to x-degree < t)."""
    _check_compatible(f, g)
    if t < 1:
        raise ValueError("truncation must be positive")
    out = _bi_convolve_rows(f.coeffs[None, :t], g.coeffs[None, :t], t,
                            [f.field], stride=2 * t - 1)
    return BiSeries(out[0], f.field)


def bi_inverse(f: BiSeries, t: int) -> BiSeries:
    """Newton inverse; needs [x^0]f to be a unit of F[y]/(y^m)."""
    if t < 1:
        raise ValueError("truncation must be positive")
    return BiSeries(_bi_inverse(f.coeffs, t, f.field), f.field)


def bi_log(f: BiSeries, t: int) -> BiSeries:
    """Log via the x-integral of f'/f plus the quotient-ring log of [x^0]f."""
    if t < 1:
        raise ValueError("truncation must be positive")
    return BiSeries(_bi_log(f.coeffs, t, f.field), f.field)


def bi_exp(f: BiSeries, t: int) -> BiSeries:
    """Newton exp g -> g*(1 - log g + f), seeded with exp([x^0]f)."""
    if t < 1:
        raise ValueError("truncation must be positive")
    return BiSeries(_bi_exp(f.coeffs, t, f.field), f.field)


def _log_table_rows(distinct_weights, t: int, m: int, fields) -> np.ndarray:
    """Accumulate sum_s count_s * log(1 + y x^s): sparse terms
    (-1)^(j+1) y^j x^(s j) / j with s j < t and j < m, one row per field."""
    r = len(fields)
    L = np.zeros((r, t, m), dtype=np.int64)
    inv = fps._inv_tables(fields, max(t - 1, 1))
    P = np.array([f.p for f in fields], dtype=np.int64)
    for s, count in distinct_weights:
        if s < 1:
            raise ValueError("weights must be positive (strip null players first)")
        if count < 1:
            raise ValueError("multiplicities must be positive")
        nj = min((t - 1) // s, m - 1)
        for j in range(1, nj + 1):
            term = inv[:, j] * (count % P) % P
            if j % 2 == 0:
                term = (P - term) % P
            L[:, s * j, j] = (L[:, s * j, j] + term) % P
    return L


def bi_binomial_product(distinct_weights, t: int, m: int, field: PrimeField) -> BiSeries:
    """Truncation of prod_s (1 + y x^s)^{count_s}: entry [y^k x^j] counts the
    subsets of the weight multiset with k elements summing to j, mod p."""
    if t < 1 or m < 1:
        raise ValueError("truncations must be positive")
    L = _log_table_rows(distinct_weights, t, m, [field])
    return BiSeries(_bi_exp_rows(L, t, [field])[0], field)


def bi_prefix_sums(f: BiSeries) -> BiSeries:
    """Running sums of whole y-vectors along the x-axis: f/(1-x) truncated."""
    return BiSeries(np.cumsum(f.coeffs, axis=0) % f.field.p, f.field)


def window_vector(grid: np.ndarray, w: int, q: int, m: int, p: int) -> np.ndarray:
    """Alternating-sum window counts per size from a prefix-form raw grid."""

    def coef_vec(k: int) -> np.ndarray:
        out = np.zeros(m, dtype=np.int64)
        if k < 0:
            return out
        j = 0
        while k - j * w >= 0 and j < m:
            row = grid[k - j * w]
            if j % 2 == 0:
                out[j:] += row[:m - j]
            else:
                out[j:] -= row[:m - j]
            j += 1
        return out

    return (coef_vec(q - 1) - coef_vec(q - w - 1)) % p


def ss_window(g: BiSeries, w: int, q: int) -> np.ndarray:
    """Per-size window counts for one distinct weight.

    Returns the vector c with c[k] = [y^k x^{q-1}](g/(1+y x^w)) minus the same
    at x^{q-w-1}; entry k is the number of size-k coalitions (not containing
    the player) whose weight lands in [q-w, q-1], mod p.  g must be the
    prefix-form series with at least q rows.
    """
    if not 1 <= w <= q:
        raise ValueError("weight must lie in [1, quota]")
    if g.x_trunc < q:
        raise ValueError("prefix series holds fewer than q coefficients")
    return window_vector(g.coeffs, w, q, g.y_trunc, g.field.p)
