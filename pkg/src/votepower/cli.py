"""Command-line frontend: compute indices, generate instances, benchmark,
self-test.

Exit codes: 0 ok, 2 parse error, 3 size-guard violation, 4 cross-method
mismatch, 1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import statistics
import sys
import time
from decimal import Decimal, ROUND_HALF_EVEN, localcontext
from fractions import Fraction

from .banzhaf import compute_banzhaf
from .game import (
    GameParseError,
    WeightedGame,
    parse_game_json,
    parse_game_text,
    random_game,
)
from .oracle import (
    OracleBudgetError,
    brute_force_banzhaf,
    brute_force_shapley,
    dp_banzhaf,
    dp_shapley,
)
from .ring import UnsupportedSizeError
from .shapley import compute_shapley

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_GUARD = 3
EXIT_MISMATCH = 4


def _sig12(fr: Fraction) -> str:
    """Fixed 12 significant digits, banker's rounding; reproducible output."""
    with localcontext() as ctx:
        ctx.prec = 12
        ctx.rounding = ROUND_HALF_EVEN
        d = Decimal(fr.numerator) / Decimal(fr.denominator)
    return str(d)


def _read_game(args) -> WeightedGame:
    if args.inline is not None:
        text = args.inline.replace("/", "\n")
        return parse_game_text(text)
    if args.input is None:
        raise GameParseError("no input given: pass a path, '-', or --inline")
    if args.input == "-":
        text = sys.stdin.read()
    else:
        with open(args.input, "r", encoding="utf-8") as fh:
            text = fh.read()
    stripped = text.lstrip()
    if (args.input != "-" and args.input.endswith(".json")) or stripped.startswith("{"):
        return parse_game_json(text)
    return parse_game_text(text)


def _indices_for(game: WeightedGame, index: str, method: str):
    """(banzhaf_result, shapley_result) as (counts, fractions) pairs or None."""
    out = {}
    if index in ("banzhaf", "both"):
        if method == "fps":
            r = compute_banzhaf(game)
            out["banzhaf"] = (r.swing_counts, r.indices, r.degenerate)
        elif method == "dp":
            r = dp_banzhaf(game)
            out["banzhaf"] = (r.counts, r.indices, r.degenerate)
        elif method == "brute":
            r = brute_force_banzhaf(game)
            out["banzhaf"] = (r.counts, r.indices, r.degenerate)
    if index in ("shapley", "both"):
        if method == "fps":
            r = compute_shapley(game)
            out["shapley"] = (r.pivot_weights, r.indices, r.degenerate)
        elif method == "dp":
            r = dp_shapley(game)
            out["shapley"] = (r.counts, r.indices, r.degenerate)
        elif method == "brute":
            r = brute_force_shapley(game, "subsets")
            out["shapley"] = (r.counts, r.indices, r.degenerate)
    return out


def _emit(args, game: WeightedGame, results: dict, out) -> None:
    kinds = sorted(results)
    degenerate = any(results[k][2] for k in kinds)
    rows = []
    for p in range(game.n):
        row = {"player": p, "weight": game.weights[p]}
        for kind in kinds:
            counts, fracs, _ = results[kind]
            if args.exact in ("rational", "both"):
                row[kind] = f"{fracs[p].numerator}/{fracs[p].denominator}"
                row[f"{kind}_count"] = str(counts[p])
            if args.exact in ("float", "both"):
                row[f"{kind}_dec"] = _sig12(fracs[p])
        rows.append(row)

    if args.format == "json":
        doc = {
            "quota": game.quota,
            "n": game.n,
            "degenerate": degenerate,
            "players": rows,
        }
        out.write(json.dumps(doc, indent=2) + "\n")
        return
    header = list(rows[0].keys())
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([row[h] for h in header])
        if degenerate:
            print("degenerate game: no winning coalition forms after the quota rule",
                  file=sys.stderr)
        return
    # table
    widths = {h: max(len(h), max(len(str(r[h])) for r in rows)) for h in header}
    out.write("  ".join(h.ljust(widths[h]) for h in header) + "\n")
    for row in rows:
        out.write("  ".join(str(row[h]).ljust(widths[h]) for h in header) + "\n")
    if degenerate:
        out.write("note: degenerate game (quota 0 or unreachable); all indices are 0\n")


def cmd_compute(args) -> int:
    try:
        game = _read_game(args)
    except (GameParseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE

    try:
        if args.method == "all-compare":
            fast = _indices_for(game, args.index, "fps")
            slow = _indices_for(game, args.index, "dp")
            for kind in fast:
                if fast[kind][0] != slow[kind][0] or fast[kind][1] != slow[kind][1]:
                    print(f"error: fps and dp disagree on the {kind} index",
                          file=sys.stderr)
                    return EXIT_MISMATCH
            results = fast
        else:
            results = _indices_for(game, args.index, args.method)
    except (OracleBudgetError, UnsupportedSizeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GUARD

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            _emit(args, game, results, fh)
    else:
        _emit(args, game, results, sys.stdout)
    return EXIT_OK


def _parse_quota_rule(text: str):
    if text == "half":
        return ("fraction", 0.5)
    kind, _, value = text.partition(":")
    if kind == "fixed":
        return ("fixed", int(value))
    if kind in ("fraction", "frac"):
        return ("fraction", float(value))
    raise ValueError(f"unknown quota rule {text!r} (use half, fixed:Q, fraction:F)")


def cmd_gen(args) -> int:
    try:
        rule = _parse_quota_rule(args.quota_rule)
        game = random_game(args.players, args.max_weight, rule, args.seed)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    if args.format == "json":
        text = json.dumps({"quota": game.quota, "weights": list(game.weights)}) + "\n"
    else:
        text = f"{game.n} {game.quota}\n" + " ".join(map(str, game.weights)) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _fit_slope(xs, ys) -> float:
    """Least-squares slope of log2(y) against log2(x)."""
    lx = [math.log2(x) for x in xs]
    ly = [math.log2(y) for y in ys]
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den


def run_bench(index: str, n: int, qs, reps: int, max_weight: int | None,
              seed: int, with_dp: bool, out, quiet: bool = False) -> dict:
    """Time the series pipeline (and optionally the DP oracle) over a q grid.

    Returns {"rows": [...], "slope": float or None, "mismatches": int}.
    One deterministic weight vector per n serves every q in the grid.
    """
    qmax = max(qs)
    if max_weight is None:
        # weights on the order of the player count, scaled up when needed to
        # keep every cell non-degenerate (total weight comfortably above qmax)
        max_weight = max(n, (3 * qmax) // n, 1)
    base = random_game(n, max_weight, ("fixed", qmax), seed)
    # one parallel policy for every cell, so the scaling fit is not skewed
    # by the fan-out heuristic switching on midway through the grid
    if index == "banzhaf":
        def compute(game):
            return compute_banzhaf(game, parallel=True)
        oracle = dp_banzhaf
    else:
        def compute(game):
            return compute_shapley(game, parallel=True)
        oracle = dp_shapley

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["index", "n", "q", "fps_median_s", "dp_median_s", "speedup"])
    rows = []
    mismatches = 0
    fps_medians = []
    for q in qs:
        game = WeightedGame(base.weights, q)
        fps_times = []
        fast = None
        for _ in range(reps):
            t0 = time.perf_counter()
            fast = compute(game)
            fps_times.append(time.perf_counter() - t0)
        fps_med = statistics.median(fps_times)
        fps_medians.append(fps_med)
        dp_med = None
        if with_dp:
            dp_times = []
            slow = None
            for _ in range(reps):
                t0 = time.perf_counter()
                slow = oracle(game)
                dp_times.append(time.perf_counter() - t0)
            dp_med = statistics.median(dp_times)
            fast_counts = (fast.swing_counts if index == "banzhaf"
                           else fast.pivot_weights)
            if fast_counts != slow.counts or fast.indices != slow.indices:
                mismatches += 1
                if not quiet:
                    print(f"MISMATCH at n={n} q={q}", file=sys.stderr)
        speedup = (dp_med / fps_med) if dp_med else ""
        writer.writerow([index, n, q, f"{fps_med:.6f}",
                         f"{dp_med:.6f}" if dp_med else "", speedup])
        rows.append({"q": q, "fps": fps_med, "dp": dp_med})
    slope = _fit_slope(qs, fps_medians) if len(qs) >= 2 else None
    if slope is not None:
        writer.writerow(["slope_log2_fps_vs_q", n, "", f"{slope:.4f}", "", ""])
    return {"rows": rows, "slope": slope, "mismatches": mismatches}


def cmd_bench(args) -> int:
    qs = [int(tok) for tok in args.q.split(",")]
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        res = run_bench(args.index, args.players, qs, args.reps,
                        args.max_weight, args.seed, not args.no_dp, out)
    finally:
        if args.out:
            out.close()
    return EXIT_MISMATCH if res["mismatches"] else EXIT_OK


def cmd_selftest(args) -> int:
    """Quick deterministic end-to-end verification."""
    import numpy as np

    from .fps import Series, series_exp, series_inverse, series_log, series_multiply
    from .ring import PRIME_TABLE, crt_reconstruct, get_field, select_prime_basis

    failures = 0

    def check(name, ok):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures += 1

    g = WeightedGame([3, 2, 1], 4)
    rb = compute_banzhaf(g)
    check("banzhaf (3,2,1;4) = 3/8,1/8,1/8",
          [str(f) for f in rb.indices] == ["3/8", "1/8", "1/8"])
    rs = compute_shapley(g)
    check("shapley (3,2,1;4) = 2/3,1/6,1/6",
          [str(f) for f in rs.indices] == ["2/3", "1/6", "1/6"])
    check("agrees with brute force",
          brute_force_banzhaf(g).counts == rb.swing_counts
          and brute_force_shapley(g, "permutations").counts == rs.pivot_weights)

    import random as _random
    rng = _random.Random(args.seed)
    ok = True
    for _ in range(25):
        n = rng.randint(1, 9)
        ws = [rng.randint(0, 12) for _ in range(n)]
        q = rng.randint(0, sum(ws) + 2)
        game = WeightedGame(ws, q)
        ok &= compute_banzhaf(game).swing_counts == brute_force_banzhaf(game).counts
        ok &= compute_shapley(game).pivot_weights == dp_shapley(game).counts
    check("25 random small games match oracles", ok)

    f = get_field(PRIME_TABLE[0][0])
    rngn = np.random.default_rng(args.seed)
    c = rngn.integers(0, f.p, 64)
    c[0] = 1
    s = Series(c, f)
    check("exp(log f) = f at t=64", series_exp(series_log(s, 64), 64) == s)
    inv = series_inverse(s, 64)
    prod = series_multiply(s, inv, 64).coeffs
    check("f * 1/f = 1 at t=64", prod[0] == 1 and not np.any(prod[1:]))

    basis = select_prime_basis(128, 64)
    x = rng.getrandbits(128)
    check("CRT round trip 128-bit",
          crt_reconstruct([x % p for p in basis.primes], basis) == x)

    dg = compute_banzhaf(WeightedGame([1, 1], 5))
    check("degenerate game reports zeros", dg.degenerate and dg.swing_counts == (0, 0))

    print("selftest:", "ok" if failures == 0 else f"{failures} failures")
    return EXIT_OK if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="votepower",
        description="Exact Banzhaf and Shapley-Shubik indices for weighted majority games")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="compute indices for a game file")
    c.add_argument("input", nargs="?", help="game file (text or .json), or - for stdin")
    c.add_argument("--inline", help="inline game, '/' separates lines: '3 4 / 3 2 1'")
    c.add_argument("--index", choices=["banzhaf", "shapley", "both"], default="both")
    c.add_argument("--method", choices=["fps", "dp", "brute", "all-compare"],
                   default="fps")
    c.add_argument("--format", choices=["table", "csv", "json"], default="table")
    c.add_argument("--exact", choices=["rational", "float", "both"], default="both")
    c.add_argument("--out", help="write to this path instead of stdout")
    c.set_defaults(func=cmd_compute)

    g = sub.add_parser("gen", help="generate a random game file")
    g.add_argument("--players", "-n", type=int, required=True)
    g.add_argument("--max-weight", type=int, default=100)
    g.add_argument("--quota-rule", default="half",
                   help="half, fixed:Q, or fraction:F (default half)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=["text", "json"], default="text")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="time the series pipeline against the DP oracle")
    b.add_argument("--index", choices=["banzhaf", "shapley"], default="banzhaf")
    b.add_argument("--players", "-n", type=int, default=1000)
    b.add_argument("--q", default="16384,65536,262144",
                   help="comma-separated quota grid")
    b.add_argument("--reps", type=int, default=3)
    b.add_argument("--max-weight", type=int, default=None)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--no-dp", action="store_true", help="skip the DP baseline")
    b.add_argument("--out", help="write the csv here instead of stdout")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("selftest", help="run a quick built-in verification suite")
    s.add_argument("--seed", type=int, default=12345)
    s.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
