"""Exact arithmetic substrate: prime fields, NTT convolution, packed integer
convolution, multi-prime basis selection, and Chinese Remainder reconstruction.

All moduli come from a fixed table of word-sized primes of the form c*2^a + 1
with a >= 21, small enough that products of two residues fit in a signed
64-bit integer.  Coefficient vectors are numpy int64 arrays of residues in
[0, p).  Convolutions are exact mod p; big counts are recovered with the CRT.
"""

from __future__ import annotations

import numpy as np
from gmpy2 import mpz


class UnsupportedSizeError(ValueError):
    """Requested truncation or player count exceeds what the prime table supports."""


class NotInvertibleError(ValueError):
    """Attempt to invert a non-unit."""


# Primes p < 2^31 with p ≡ 1 (mod 2^21), descending, as (p, v2(p-1)) pairs.
# Each supports exact transforms up to length 2^a.  Verified by tests.
PRIME_TABLE: list[tuple[int, int]] = [
    (2130706433, 24),
    (2113929217, 25),
    (2099249153, 21),
    (2095054849, 21),
    (2088763393, 23),
    (2025848833, 22),
    (2013265921, 27),
    (1998585857, 21),
    (1931476993, 21),
    (1893728257, 21),
    (1868562433, 21),
    (1866465281, 22),
    (1835008001, 21),
    (1811939329, 26),
    (1790967809, 22),
    (1711276033, 25),
    (1709178881, 21),
    (1654652929, 21),
    (1572864001, 22),
    (1570766849, 21),
    (1558183937, 21),
    (1541406721, 21),
    (1484783617, 23),
    (1438646273, 22),
    (1415577601, 21),
    (1365245953, 21),
    (1327497217, 21),
    (1321205761, 22),
    (1306525697, 21),
    (1300234241, 23),
    (1281359873, 21),
    (1224736769, 24),
    (1218445313, 21),
    (1214251009, 21),
    (1212153857, 22),
    (1205862401, 21),
    (1161822209, 22),
    (1151336449, 21),
    (1138753537, 21),
    (1107296257, 25),
    (1092616193, 21),
    (1012924417, 21),
    (1004535809, 21),
    (998244353, 23),
    (985661441, 22),
    (975175681, 21),
    (962592769, 21),
    (950009857, 21),
    (943718401, 22),
    (935329793, 22),
    (924844033, 21),
    (918552577, 22),
    (899678209, 21),
    (897581057, 23),
    (880803841, 23),
    (824180737, 21),
    (799014913, 21),
    (786432001, 21),
    (754974721, 24),
    (740294657, 21),
    (715128833, 21),
    (710934529, 21),
    (683671553, 22),
    (666894337, 22),
    (648019969, 21),
    (645922817, 23),
    (639631361, 21),
    (635437057, 21),
    (597688321, 21),
    (595591169, 23),
    (576716801, 21),
    (469762049, 26),
    (463470593, 21),
    (459276289, 21),
    (415236097, 22),
    (387973121, 21),
    (383778817, 21),
    (377487361, 23),
    (274726913, 21),
    (270532609, 21),
    (257949697, 21),
    (249561089, 21),
    (230686721, 22),
    (211812353, 21),
    (199229441, 21),
    (186646529, 21),
    (169869313, 21),
    (167772161, 25),
    (163577857, 22),
    (155189249, 22),
    (138412033, 22),
    (136314881, 21),
    (132120577, 21),
    (113246209, 22),
    (111149057, 21),
    (104857601, 22),
    (81788929, 21),
    (69206017, 21),
    (23068673, 21),
]


def _find_root(p: int, a: int) -> int:
    """Element of order exactly 2^a in F_p, via a small primitive root."""
    c = (p - 1) >> a
    factors = {2}
    d, rest = 3, c
    while d * d <= rest:
        while rest % d == 0:
            factors.add(d)
            rest //= d
        d += 2
    if rest > 1:
        factors.add(rest)
    g = 2
    while any(pow(g, (p - 1) // f, p) == 1 for f in factors):
        g += 1
    return pow(g, (p - 1) >> a, p)


class PrimeField:
    """F_p for a tabled prime p = c*2^a + 1.

    Holds lazily grown caches: per-stage NTT twiddle factors (stage s uses
    powers of the order-2^s root, independent of transform length), bit
    reversal permutations, and the table of inverses 1..k.
    """

    def __init__(self, p: int, two_adicity: int):
        self.p = p
        self.two_adicity = two_adicity
        self.root = _find_root(p, two_adicity)
        self._tw_f: list[np.ndarray] = []    # _tw_f[s-1]: stage-s forward twiddles
        self._tw_i: list[np.ndarray] = []
        self._bitrev: dict[int, np.ndarray] = {}
        self._inv_tab = np.array([0, 1], dtype=np.int64)

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    @property
    def max_transform(self) -> int:
        return 1 << self.two_adicity

    def add(self, x: int, y: int) -> int:
        return (x + y) % self.p

    def sub(self, x: int, y: int) -> int:
        return (x - y) % self.p

    def mul(self, x: int, y: int) -> int:
        return (x * y) % self.p

    def inv(self, x: int) -> int:
        if x % self.p == 0:
            raise NotInvertibleError(f"0 has no inverse mod {self.p}")
        return pow(x, self.p - 2, self.p)

    def inverse_table(self, k: int) -> np.ndarray:
        """Array t with t[i] = i^{-1} mod p for 1 <= i <= k (t[0] unused)."""
        if k < len(self._inv_tab):
            return self._inv_tab
        p = self.p
        tab = self._inv_tab.tolist()
        for i in range(len(tab), k + 1):
            tab.append((p - p // i) * tab[p % i] % p)
        self._inv_tab = np.array(tab, dtype=np.int64)
        return self._inv_tab

    # -- NTT machinery ------------------------------------------------------

    def _stage_twiddles(self, stages: int, inverse: bool) -> list[np.ndarray]:
        cache = self._tw_i if inverse else self._tw_f
        p = self.p
        while len(cache) < stages:
            s = len(cache) + 1
            if s > self.two_adicity:
                raise UnsupportedSizeError(
                    f"transform length 2^{s} exceeds capacity 2^{self.two_adicity} of {p}")
            w = pow(self.root, 1 << (self.two_adicity - s), p)
            if inverse:
                w = pow(w, p - 2, p)
            half = 1 << (s - 1)
            tw = np.empty(half, dtype=np.int64)
            acc = 1
            for j in range(half):
                tw[j] = acc
                acc = acc * w % p
            cache.append(tw)
        return cache

    def _bit_reverse(self, n: int) -> np.ndarray:
        if n not in self._bitrev:
            lg = n.bit_length() - 1
            idx = np.arange(n, dtype=np.int64)
            rev = np.zeros(n, dtype=np.int64)
            for i in range(lg):
                rev |= ((idx >> i) & 1) << (lg - 1 - i)
            self._bitrev[n] = rev
        return self._bitrev[n]

    def ntt(self, a: np.ndarray, inverse: bool = False) -> np.ndarray:
        """In-order radix-2 transform of a power-of-two length vector."""
        n = len(a)
        if n & (n - 1):
            raise ValueError("transform length must be a power of two")
        if n > self.max_transform:
            raise UnsupportedSizeError(
                f"transform length {n} exceeds capacity {self.max_transform} of {self.p}")
        p = self.p
        lg = n.bit_length() - 1
        x = a[self._bit_reverse(n)]
        tws = self._stage_twiddles(lg, inverse)
        for s in range(1, lg + 1):
            m = 1 << s
            half = m >> 1
            y = x.reshape(-1, m)
            u = y[:, :half].copy()
            v = y[:, half:] * tws[s - 1] % p
            y[:, :half] = (u + v) % p
            y[:, half:] = (u - v) % p
        if inverse:
            x = x * pow(n, p - 2, p) % p
        return x


_FIELDS: dict[int, PrimeField] = {}


def get_field(p: int) -> PrimeField:
    """Shared PrimeField instance for a tabled prime."""
    if p not in _FIELDS:
        for q, a in PRIME_TABLE:
            if q == p:
                _FIELDS[p] = PrimeField(p, a)
                break
        else:
            raise ValueError(f"{p} is not in the prime table")
    return _FIELDS[p]


# -- convolution engines ----------------------------------------------------

def _school_convolve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Shift-and-add convolution, reducing after every row to avoid overflow."""
    if len(a) > len(b):
        a, b = b, a
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i in range(len(a)):
        out[i:i + len(b)] = (out[i:i + len(b)] + a[i] * b) % p
    return out


def ntt_convolve(a: np.ndarray, b: np.ndarray, field: PrimeField) -> np.ndarray:
    """Full convolution of residue vectors over one prime field via the NTT.

    Returns c with c[k] = sum_{i+j=k} a[i]*b[j] mod p, length len(a)+len(b)-1.
    """
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return np.zeros(0, dtype=np.int64)
    out_len = la + lb - 1
    n = 1 << (out_len - 1).bit_length() if out_len > 1 else 1
    if n > field.max_transform:
        raise UnsupportedSizeError(
            f"convolution length {out_len} exceeds transform capacity "
            f"{field.max_transform} of {field.p}")
    fa = np.zeros(n, dtype=np.int64)
    fa[:la] = a
    fb = np.zeros(n, dtype=np.int64)
    fb[:lb] = b
    fa = field.ntt(fa)
    fb = field.ntt(fb)
    fc = fa * fb % field.p
    return field.ntt(fc, inverse=True)[:out_len]


# Packed-integer convolution: residues go into byte-aligned fields wide
# enough that a product coefficient sum_{i+j=k} a_i b_j (at most
# min(la,lb) * modulus^2) can never overflow its field, then one GMP
# multiplication computes the whole convolution exactly.

def field_width(modulus_bits: int, min_len: int) -> int:
    """Packed field width in bytes for the given operand bound."""
    bits = 2 * modulus_bits + max(1, (min_len - 1).bit_length())
    return (bits + 7) // 8


_PIECE_W32 = 256 ** np.arange(4, dtype=np.int64)


def _pack_width(a: np.ndarray, width: int) -> mpz:
    """Non-negative int64 values (< 2^63) into width-byte little-endian fields."""
    buf = np.zeros((len(a), width), dtype=np.uint8)
    nb = min(8, width)
    buf[:, :nb] = a.astype('<u8').view(np.uint8).reshape(len(a), 8)[:, :nb]
    return mpz.from_bytes(buf.tobytes(), 'little')


def _unpack_pieces(z: mpz, total_len: int, width: int, keep: int) -> list[np.ndarray]:
    """Split the first keep fields of z into int64 arrays of 32-bit pieces."""
    raw = z.to_bytes(total_len * width, 'little')
    arr = np.frombuffer(raw, dtype=np.uint8, count=keep * width).reshape(keep, width)
    pieces = []
    for off in range(0, width, 4):
        chunk = arr[:, off:off + 4]
        pieces.append(chunk.astype(np.int64) @ _PIECE_W32[:chunk.shape[1]])
    return pieces


def _fold_pieces_mod(pieces: list[np.ndarray], p: int) -> np.ndarray:
    """Recombine 32-bit pieces mod p: sum_g piece_g * 2^(32 g)."""
    r = pieces[0] % p
    shift = 1
    for g in range(1, len(pieces)):
        shift = (shift << 32) % p
        r = r + shift * (pieces[g] % p) % p
    return r % p


def packed_convolve(a: np.ndarray, b: np.ndarray, field: PrimeField) -> np.ndarray:
    """Exact convolution mod p through one big-integer multiplication."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return np.zeros(0, dtype=np.int64)
    if min(la, lb) > (1 << 26):
        raise UnsupportedSizeError("operands too long for packed convolution")
    width = field_width(31, min(la, lb))
    out_len = la + lb - 1
    z = _pack_width(a, width) * _pack_width(b, width)
    pieces = _unpack_pieces(z, out_len, width, out_len)
    return _fold_pieces_mod(pieces, field.p)


def convolve_rows(A: np.ndarray, B: np.ndarray, fields) -> np.ndarray:
    """Row-stacked exact convolution: row i of the output is the convolution
    of A[i] with B[i] mod fields[i].p."""
    r, la = A.shape
    lb = B.shape[1]
    if la == 0 or lb == 0:
        return np.zeros((r, 0), dtype=np.int64)
    return np.vstack([convolve(A[i], B[i], fields[i]) for i in range(r)])


_SCHOOL_CUTOFF = 32
_NTT_CUTOFF = 2048


def convolve(a: np.ndarray, b: np.ndarray, field: PrimeField) -> np.ndarray:
    """Exact full convolution mod p, routed to the cheapest engine."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return np.zeros(0, dtype=np.int64)
    if min(la, lb) == 1:
        vec, scalar = (a, int(b[0])) if lb == 1 else (b, int(a[0]))
        return vec * scalar % field.p
    if min(la, lb) <= _SCHOOL_CUTOFF:
        return _school_convolve(a, b, field.p)
    out_len = la + lb - 1
    if out_len <= _NTT_CUTOFF and out_len <= field.max_transform:
        return ntt_convolve(a, b, field)
    return packed_convolve(a, b, field)


# -- prime basis and CRT ----------------------------------------------------

class PrimeBasis:
    """A set of distinct tabled primes whose product exceeds 2^n.

    Guarantees unique CRT recovery of any count below the product, and that
    every prime exceeds the truncation length t so all divisors 1..t used by
    series integration are invertible.
    """

    def __init__(self, fields: list[PrimeField]):
        self.fields = fields
        self.primes = [f.p for f in fields]
        self.product = 1
        for p in self.primes:
            self.product *= p
        self.product_bits = self.product.bit_length()
        # CRT coefficients: c_i = M_i * (M_i^{-1} mod p_i), M_i = product/p_i
        M = mpz(self.product)
        self._crt_coeff = []
        for p in self.primes:
            Mi = M // p
            self._crt_coeff.append(Mi * pow(Mi % p, p - 2, p))

    def __len__(self) -> int:
        return len(self.fields)

    def __repr__(self) -> str:
        return f"PrimeBasis({len(self.primes)} primes, {self.product_bits} bits)"


def select_prime_basis(n: int, t: int) -> PrimeBasis:
    """Smallest prefix of the prime table covering counts up to 2^n at truncation t.

    Every selected prime p satisfies p > t and has 2-adic transform capacity
    at least the power of two covering length 2t.
    """
    if n < 1 or t < 1:
        raise ValueError("player count and truncation must be positive")
    a_req = max(1, (2 * t - 1).bit_length())
    fields = []
    product = 1
    bound = 1 << n
    for p, a in PRIME_TABLE:
        if a >= a_req and p > t:
            fields.append(get_field(p))
            product *= p
            if product > bound:
                return PrimeBasis(fields)
    raise UnsupportedSizeError(
        f"prime table cannot cover n={n}, t={t} "
        f"(need product > 2^{n} from primes with capacity 2^{a_req})")


def crt_reconstruct(residues, basis: PrimeBasis) -> int:
    """The unique x in [0, prod(primes)) matching every residue."""
    if len(residues) != len(basis.primes):
        raise ValueError("one residue per basis prime required")
    acc = mpz(0)
    for r, p, c in zip(residues, basis.primes, basis._crt_coeff):
        r = int(r)
        if not 0 <= r < p:
            raise ValueError(f"residue {r} out of range for modulus {p}")
        acc += r * c
    return int(acc % basis.product)
