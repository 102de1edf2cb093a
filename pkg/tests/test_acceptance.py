"""Acceptance suite: one test per criterion, exact tolerances, pass/fail prints.

Criteria:
  1. 500 random small games match brute force exactly (both indices).
  2. 50 random medium games match the big-integer DP oracles exactly.
  3. Shapley-Shubik indices sum to exactly 1 on every non-degenerate instance.
  4. Kernel identities, 200 randomized cases each.
  5. Generating-function coefficients equal exhaustive subset histograms.
  6. Scaling: fitted log-log slope of runtime vs quota in [0.9, 1.4]; series
     pipeline at least 5x faster than the DP at n=2000, q=2^18.
  7. Degenerate micro-suite.
  8. Known hand-checked instances.
"""

import math
import random
import time
from collections import Counter
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from votepower.banzhaf import compute_banzhaf
from votepower.bifps import BiSeries, _pack_grid, bi_binomial_product, bi_exp, bi_log
from votepower.fps import (
    Series,
    binomial_product,
    series_exp,
    series_inverse,
    series_log,
    series_multiply,
)
from votepower.game import WeightedGame, random_game
from votepower.oracle import (
    brute_force_banzhaf,
    brute_force_shapley,
    dp_banzhaf,
    dp_shapley,
)
from votepower.ring import PRIME_TABLE, crt_reconstruct, get_field, ntt_convolve, select_prime_basis
from votepower.shapley import compute_shapley

SMALL_SUITE_SIZE = 500
MEDIUM_SUITE_SIZE = 50


def _small_suite():
    """Suite 1: n <= 12, weights <= 30 (zeros included), q in [1, w(N)+2]."""
    rng = random.Random(20260808)
    games = []
    for _ in range(SMALL_SUITE_SIZE):
        n = rng.randint(1, 12)
        weights = [rng.randint(0, 30) for _ in range(n)]
        q = rng.randint(1, sum(weights) + 2)
        games.append(WeightedGame(weights, q))
    return games


@pytest.fixture(scope="module")
def small_results():
    games = _small_suite()
    results = []
    for g in games:
        results.append((g, compute_banzhaf(g), compute_shapley(g)))
    return results


class TestCriterion1SmallOracleEquivalence:
    def test_small_games_match_brute_force(self, small_results):
        t0 = time.perf_counter()
        for g, rb, rs in small_results:
            ob = brute_force_banzhaf(g)
            os_ = brute_force_shapley(g, "subsets")
            assert rb.swing_counts == ob.counts, f"banzhaf counts differ on {g}"
            assert rb.indices == ob.indices
            assert rs.pivot_weights == os_.counts, f"shapley counts differ on {g}"
            assert rs.indices == os_.indices
        dt = time.perf_counter() - t0
        print(f"\nPASS criterion 1: {len(small_results)} small games == brute force "
              f"(exact, verify took {dt:.1f}s)")


def _medium_suite():
    """Suite 2: log-uniform sizes under the caps plus cap-exercising instances."""
    rng = random.Random(77)

    def log_uniform(lo, hi):
        return int(round(math.exp(rng.uniform(math.log(lo), math.log(hi)))))

    banzhaf_games = []
    for _ in range(MEDIUM_SUITE_SIZE // 2 - 1):
        n = log_uniform(1, 300)
        q = log_uniform(1, 50_000)
        w = max(1, 2 * q // max(n, 1) + 1)
        g = random_game(n, w, ("fixed", q), seed=rng.getrandbits(32))
        banzhaf_games.append(g)
    banzhaf_games.append(random_game(300, 400, ("fixed", 50_000), seed=4242))

    shapley_games = []
    for _ in range(MEDIUM_SUITE_SIZE // 2 - 2):
        n = log_uniform(1, 150)
        q = log_uniform(1, 4_000)
        w = max(1, 2 * q // max(n, 1) + 1)
        g = random_game(n, w, ("fixed", q), seed=rng.getrandbits(32))
        shapley_games.append(g)
    shapley_games.append(random_game(150, 40, ("fixed", 2_500), seed=4343))   # n at cap
    shapley_games.append(random_game(30, 1500, ("fixed", 20_000), seed=4444))  # q at cap
    return banzhaf_games, shapley_games


@pytest.fixture(scope="module")
def medium_results():
    banzhaf_games, shapley_games = _medium_suite()
    bz = [(g, compute_banzhaf(g)) for g in banzhaf_games]
    ss = [(g, compute_shapley(g)) for g in shapley_games]
    return bz, ss


class TestCriterion2MediumOracleEquivalence:
    def test_medium_games_match_dp(self, medium_results):
        t0 = time.perf_counter()
        bz, ss = medium_results
        for g, r in bz:
            o = dp_banzhaf(g)
            assert r.swing_counts == o.counts, f"banzhaf mismatch on n={g.n} q={g.quota}"
            assert r.indices == o.indices
        for g, r in ss:
            o = dp_shapley(g)
            assert r.pivot_weights == o.counts, f"shapley mismatch on n={g.n} q={g.quota}"
            assert r.indices == o.indices
        dt = time.perf_counter() - t0
        sizes = [(g.n, g.quota) for g, _ in bz] + [(g.n, g.quota) for g, _ in ss]
        biggest = max(sizes, key=lambda s: s[0] * s[1])
        print(f"\nPASS criterion 2: {len(bz)} banzhaf + {len(ss)} shapley medium games "
              f"== DP oracles (exact; largest cell n={biggest[0]} q={biggest[1]}; "
              f"dp verify took {dt:.1f}s)")


class TestCriterion3Efficiency:
    def test_shapley_sums_to_one_small(self, small_results):
        checked = 0
        for g, _, rs in small_results:
            if not rs.degenerate:
                assert sum(rs.indices, Fraction(0)) == 1, f"sum != 1 on {g}"
                checked += 1
        print(f"\nPASS criterion 3 (suite 1): sum SS == 1 on {checked} instances")

    def test_shapley_sums_to_one_medium(self, medium_results):
        _, ss = medium_results
        checked = 0
        for g, r in ss:
            if not r.degenerate:
                assert sum(r.indices, Fraction(0)) == 1
                checked += 1
        print(f"\nPASS criterion 3 (suite 2): sum SS == 1 on {checked} instances")


class TestCriterion4KernelIdentities:
    CASES = 200

    def test_inverse_identity(self):
        rng = np.random.default_rng(404)
        for i in range(self.CASES):
            f = get_field(PRIME_TABLE[int(rng.integers(len(PRIME_TABLE)))][0])
            t = int(rng.integers(1, 80))
            c = rng.integers(0, f.p, t)
            c[0] = rng.integers(1, f.p)
            s = Series(c, f)
            prod = series_multiply(s, series_inverse(s, t), t).coeffs
            assert prod[0] == 1 and not np.any(prod[1:])
        print(f"\nPASS criterion 4a: f * 1/f == 1, {self.CASES} cases")

    def test_exp_log_round_trips_univariate(self):
        rng = np.random.default_rng(405)
        for i in range(self.CASES):
            f = get_field(PRIME_TABLE[int(rng.integers(len(PRIME_TABLE)))][0])
            t = int(rng.integers(1, 80))
            c = rng.integers(0, f.p, t)
            c[0] = 1
            s = Series(c, f)
            assert series_exp(series_log(s, t), t) == s
            c[0] = 0
            h = Series(c, f)
            assert series_log(series_exp(h, t), t) == h
        print(f"PASS criterion 4b: exp(log f) == f and log(exp h) == h, "
              f"{self.CASES} univariate cases")

    def test_exp_log_round_trips_bivariate(self):
        rng = np.random.default_rng(406)
        for i in range(self.CASES):
            f = get_field(PRIME_TABLE[int(rng.integers(len(PRIME_TABLE)))][0])
            t = int(rng.integers(1, 14))
            m = int(rng.integers(1, 7))
            c = rng.integers(0, f.p, (t, m))
            c[0, 0] = 1
            s = BiSeries(c, f)
            assert bi_exp(bi_log(s, t), t) == s
            c[0, 0] = 0
            h = BiSeries(c, f)
            assert bi_log(bi_exp(h, t), t) == h
        print(f"PASS criterion 4c: bivariate exp/log round trips, {self.CASES} cases")

    def test_ntt_equals_schoolbook(self):
        rng = np.random.default_rng(407)
        for i in range(self.CASES):
            f = get_field(PRIME_TABLE[int(rng.integers(len(PRIME_TABLE)))][0])
            la, lb = int(rng.integers(1, 64)), int(rng.integers(1, 64))
            a = rng.integers(0, f.p, la).astype(np.int64)
            b = rng.integers(0, f.p, lb).astype(np.int64)
            school = [0] * (la + lb - 1)
            for x in range(la):
                for y in range(lb):
                    school[x + y] = (school[x + y] + int(a[x]) * int(b[y])) % f.p
            assert ntt_convolve(a, b, f).tolist() == school
        print(f"PASS criterion 4d: NTT == schoolbook, {self.CASES} cases")

    def test_kronecker_round_trip(self):
        rng = np.random.default_rng(408)
        for i in range(self.CASES):
            x_len = int(rng.integers(1, 20))
            m = int(rng.integers(1, 10))
            stride = 2 * x_len - 1
            grid = rng.integers(0, 2**31, (x_len, m)).astype(np.int64)
            flat = _pack_grid(grid, stride)
            back = flat.reshape(m, stride)[:, :x_len].T
            assert np.array_equal(back, grid)
        print(f"PASS criterion 4e: Kronecker pack/unpack lossless, {self.CASES} cases")


class TestCriterion5GeneratingFunctionCounts:
    def test_histograms_match_enumeration(self, small_results):
        basis = select_prime_basis(64, 400)   # 3+ primes, exercises real CRT
        checked = 0
        for g, _, _ in small_results:
            weights = [w for w in g.weights if w > 0]
            if not weights or g.n > 14:
                continue
            t = min(g.quota, sum(weights) + 1)
            m = max(1, min(len(weights), t))
            hist = np.zeros(t, dtype=object)
            hist2 = np.zeros((t, m), dtype=object)
            for r in range(len(weights) + 1):
                for combo in combinations(weights, r):
                    s = sum(combo)
                    if s < t:
                        hist[s] += 1
                        if r < m:
                            hist2[s, r] += 1
            dw = sorted(Counter(weights).items())
            uni_rows, bi_rows = [], []
            for p in basis.primes:
                f = get_field(p)
                uni = binomial_product(dw, t, f).coeffs
                assert uni.tolist() == [int(c) % p for c in hist], f"mod {p} on {g}"
                bi = bi_binomial_product(dw, t, m, f).coeffs
                assert np.array_equal(
                    bi, np.vectorize(lambda c: int(c) % p)(hist2).astype(np.int64)), \
                    f"bivariate mod {p} on {g}"
                uni_rows.append(uni)
                bi_rows.append(bi)
            for j in range(t):
                assert crt_reconstruct([row[j] for row in uni_rows], basis) == hist[j]
            for j in range(t):
                for k in range(m):
                    assert crt_reconstruct([row[j, k] for row in bi_rows],
                                           basis) == hist2[j, k]
            checked += 1
        print(f"\nPASS criterion 5: subset histograms match mod each prime and "
              f"after CRT on {checked} games")


class TestCriterion6Scaling:
    def test_slope_and_speedup(self, capsys):
        import io
        from votepower.cli import run_bench

        # (a) fitted log-log slope of the series pipeline vs quota
        qs = [2**14, 2**15, 2**16, 2**17, 2**18, 2**19]
        res = run_bench("banzhaf", 1000, qs, reps=1, max_weight=None,
                        seed=60, with_dp=False, out=io.StringIO())
        slope = res["slope"]
        assert slope is not None and 0.9 <= slope <= 1.4, f"slope {slope} outside [0.9, 1.4]"

        # (b) series pipeline vs DP at n=2000, q=2^18
        n, q = 2000, 2**18
        g = random_game(n, max(n, 3 * q // n), ("fixed", q), seed=61)
        t0 = time.perf_counter()
        fast = compute_banzhaf(g, parallel=True)
        t_fps = time.perf_counter() - t0
        t0 = time.perf_counter()
        slow = dp_banzhaf(g)
        t_dp = time.perf_counter() - t0
        assert fast.swing_counts == slow.counts
        ratio = t_dp / t_fps
        assert ratio >= 5.0, f"speedup {ratio:.2f}x below 5x (fps {t_fps:.1f}s dp {t_dp:.1f}s)"
        with capsys.disabled():
            print(f"\nPASS criterion 6: slope {slope:.3f} in [0.9, 1.4]; "
                  f"n={n} q={q}: fps {t_fps:.1f}s vs dp {t_dp:.1f}s = {ratio:.1f}x >= 5x")


class TestCriterion7DegenerateHandling:
    def test_micro_suite(self):
        t0 = time.perf_counter()
        # quota zero: everyone wins always, nobody ever swings or pivots
        for compute in (compute_banzhaf, compute_shapley):
            r = compute(WeightedGame([3, 0, 2], 0))
            assert r.degenerate and all(ix == 0 for ix in r.indices)
        assert brute_force_banzhaf(WeightedGame([3, 0, 2], 0)).counts == (0, 0, 0)
        assert brute_force_shapley(WeightedGame([3, 0, 2], 0),
                                   "permutations").counts == (0, 0, 0)

        # unreachable quota
        g = WeightedGame([1, 1], 5)
        for compute in (compute_banzhaf, compute_shapley):
            r = compute(g)
            assert r.degenerate and all(ix == 0 for ix in r.indices)
        assert brute_force_banzhaf(g).counts == (0, 0)

        # zero-weight players never swing; others match brute force
        g = WeightedGame([0, 5, 0, 3], 6)
        rb = compute_banzhaf(g)
        rs = compute_shapley(g)
        assert rb.swing_counts[0] == rb.swing_counts[2] == 0
        assert rs.pivot_weights[0] == rs.pivot_weights[2] == 0
        assert rb.swing_counts == brute_force_banzhaf(g).counts
        assert rs.pivot_weights == brute_force_shapley(g, "permutations").counts

        # weights at and above the quota (capping must preserve everything)
        g = WeightedGame([12, 5, 4, 1], 5)
        assert compute_banzhaf(g).swing_counts == brute_force_banzhaf(g).counts
        assert compute_shapley(g).pivot_weights == brute_force_shapley(
            g, "permutations").counts

        # single-player games
        assert compute_banzhaf(WeightedGame([7], 5)).indices == (Fraction(1, 2),)
        assert compute_shapley(WeightedGame([7], 5)).indices == (Fraction(1),)
        assert compute_banzhaf(WeightedGame([7], 9)).degenerate
        dt = time.perf_counter() - t0
        print(f"\nPASS criterion 7: degenerate micro-suite ({dt:.2f}s)")


class TestCriterion8HandChecked:
    def test_three_two_one(self):
        rb = compute_banzhaf(WeightedGame([3, 2, 1], 4))
        assert rb.indices == (Fraction(3, 8), Fraction(1, 8), Fraction(1, 8))
        rs = compute_shapley(WeightedGame([3, 2, 1], 4))
        assert rs.indices == (Fraction(2, 3), Fraction(1, 6), Fraction(1, 6))
        print("\nPASS criterion 8a: (3,2,1; q=4) -> Bz (3/8,1/8,1/8), SS (2/3,1/6,1/6)")

    def test_symmetric_games(self):
        for n in (1, 2, 3, 5, 8):
            for q_mult in (1, 2):
                q = min(n, max(1, q_mult * n // 2))
                g = WeightedGame([1] * n, q)
                rb = compute_banzhaf(g)
                rs = compute_shapley(g)
                assert len(set(rb.indices)) == 1
                assert rs.indices == (Fraction(1, n),) * n
        print("PASS criterion 8b: symmetric games have equal indices, SS = 1/n")
