"""Problem instances: validation, normalization, random generation, parsing.

Normalization restores the regime the series pipelines need: zero-weight
players are split off as nulls (their index is 0 and they scale counts by
powers of two), weights above the quota are capped to exactly the quota
(status-preserving), and the survivors are grouped into (weight,
multiplicity) buckets.  Degenerate quotas are flagged rather than rejected.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

_U64_MAX = 2**64 - 1


class InvalidGameError(ValueError):
    """The instance violates the weighted-game invariants."""


class GameParseError(ValueError):
    """A game file or inline game description could not be parsed."""


@dataclass(frozen=True)
class WeightedGame:
    """Player weights (index = player id) plus a quota."""

    weights: tuple[int, ...]
    quota: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "quota", int(self.quota))
        if not self.weights:
            raise InvalidGameError("a game needs at least one player")
        if not 0 <= self.quota <= _U64_MAX:
            raise InvalidGameError("quota must fit in an unsigned 64-bit integer")
        for i, w in enumerate(self.weights):
            if not 0 <= w <= _U64_MAX:
                raise InvalidGameError(
                    f"weight of player {i} must fit in an unsigned 64-bit integer")

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def total_weight(self) -> int:
        return sum(self.weights)


@dataclass(eq=False)
class NormalizedGame:
    """Capped, grouped view of a game, ready for the series pipelines."""

    quota: int
    n: int
    distinct_weights: tuple[tuple[int, int], ...]   # (weight, multiplicity), ascending
    null_players: tuple[int, ...]
    cap_applied: tuple[bool, ...]
    original_to_distinct: dict[int, int]
    n_effective: int
    quota_zero: bool
    no_winning_coalition: bool

    @property
    def degenerate(self) -> bool:
        return self.quota_zero or self.no_winning_coalition

    def effective_weight(self, player: int) -> int:
        """Post-cap weight of a non-null player."""
        return self.distinct_weights[self.original_to_distinct[player]][0]


def normalize(game: WeightedGame) -> NormalizedGame:
    """Cap weights at the quota, strip null players, group by weight.

    Capping preserves every coalition's winning status: a coalition holding a
    weight > q player wins with or without the cap.  With q = 0 every
    coalition (including the empty one) wins, so nobody ever swings or
    pivots; all players are recorded as nulls and the flag is set.
    """
    q = game.quota
    n = game.n
    if q == 0:
        return NormalizedGame(
            quota=q, n=n, distinct_weights=(),
            null_players=tuple(range(n)),
            cap_applied=(False,) * n,
            original_to_distinct={},
            n_effective=0, quota_zero=True,
            no_winning_coalition=False)

    nulls = []
    caps = []
    buckets: dict[int, int] = {}
    capped_weights: list[int | None] = []
    for i, w in enumerate(game.weights):
        if w == 0:
            nulls.append(i)
            caps.append(False)
            capped_weights.append(None)
            continue
        capped = min(w, q)
        caps.append(capped != w)
        capped_weights.append(capped)
        buckets[capped] = buckets.get(capped, 0) + 1

    distinct = tuple(sorted(buckets.items()))
    index_of = {w: k for k, (w, _) in enumerate(distinct)}
    mapping = {i: index_of[cw] for i, cw in enumerate(capped_weights) if cw is not None}
    return NormalizedGame(
        quota=q, n=n, distinct_weights=distinct,
        null_players=tuple(nulls),
        cap_applied=tuple(caps),
        original_to_distinct=mapping,
        n_effective=n - len(nulls),
        quota_zero=False,
        no_winning_coalition=game.total_weight < q)


def random_game(n: int, max_weight: int, quota_rule=("fraction", 0.5),
                seed: int = 0) -> WeightedGame:
    """Deterministic random instance: weights uniform in [1, max_weight].

    quota_rule is ("fixed", q) or ("fraction", f) of the total weight; the
    string "half" is shorthand for ("fraction", 0.5).  The quota is clamped
    to [1, w(N)].
    """
    if n < 1:
        raise ValueError("need at least one player")
    if max_weight < 1:
        raise ValueError("max_weight must be positive")
    if quota_rule == "half":
        quota_rule = ("fraction", 0.5)
    rng = random.Random(seed)
    weights = [rng.randint(1, max_weight) for _ in range(n)]
    total = sum(weights)
    kind, value = quota_rule
    if kind == "fixed":
        q = int(value)
    elif kind == "fraction":
        q = math.ceil(total * value)
    else:
        raise ValueError(f"unknown quota rule {kind!r}")
    return WeightedGame(weights, max(1, min(total, q)))


# -- game file formats -------------------------------------------------------

def parse_game_text(text: str) -> WeightedGame:
    """Plain format: first line "n q", second line n whitespace-separated weights."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise GameParseError("expected two lines: 'n q' then the weights")
    head = lines[0].split()
    if len(head) != 2:
        raise GameParseError(f"first line must be 'n q', got {lines[0]!r}")
    try:
        n, q = int(head[0]), int(head[1])
        weights = [int(tok) for tok in lines[1].split()]
    except ValueError as e:
        raise GameParseError(f"non-integer token: {e}") from None
    if len(weights) != n:
        raise GameParseError(f"header says {n} players but {len(weights)} weights given")
    try:
        return WeightedGame(weights, q)
    except InvalidGameError as e:
        raise GameParseError(str(e)) from None


def parse_game_json(text: str) -> WeightedGame:
    """JSON format: {"quota": q, "weights": [w0, w1, ...]}."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise GameParseError(
            f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(obj, dict) or "quota" not in obj or "weights" not in obj:
        raise GameParseError('JSON game needs the keys "quota" and "weights"')
    weights = obj["weights"]
    if not isinstance(weights, list) or not all(
            isinstance(w, int) and not isinstance(w, bool) for w in weights):
        raise GameParseError('"weights" must be a list of integers')
    if not isinstance(obj["quota"], int) or isinstance(obj["quota"], bool):
        raise GameParseError('"quota" must be an integer')
    try:
        return WeightedGame(weights, obj["quota"])
    except InvalidGameError as e:
        raise GameParseError(str(e)) from None
