"""Brute-force reference computations on a finite window ``[1, horizon]``.

Nothing here uses the structural shortcuts of :mod:`zigzag.invariants`;
every answer comes from a table of values obtained by pointwise evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fencemap import FenceMap, evaluate

DEFAULT_HORIZON = 200
MAX_HORIZON = 10**6


def precedes_or_equal(a: int, b: int) -> bool:
    """Zig-zag order: odd ``a`` sits below its even neighbours."""
    return a == b or (a % 2 == 1 and abs(a - b) == 1)


@dataclass(frozen=True)
class PrefixTable:
    horizon: int
    values: tuple[int, ...]

    @classmethod
    def of(cls, m: FenceMap, horizon: int) -> PrefixTable:
        return cls(horizon, tuple(evaluate(m, x) for x in range(1, horizon + 1)))

    def __getitem__(self, x: int) -> int:
        return self.values[x - 1]


def auto_horizon(*maps: FenceMap, base: int = DEFAULT_HORIZON) -> int:
    """Smallest doubling of ``base`` covering ``tail_start + 2 * period`` of every map."""
    need = max((m.tail_start + 2 * m.tail_period for m in maps), default=0)
    h = base
    while h < need and h < MAX_HORIZON:
        h *= 2
    return min(h, MAX_HORIZON)


def brute_preserving(m: FenceMap, horizon: int) -> bool:
    if horizon < 3:
        raise ValueError("horizon must be at least 3")
    t = PrefixTable.of(m, horizon)
    for x in range(1, horizon):
        y = x + 1
        for a, b in ((x, y), (y, x)):
            if precedes_or_equal(a, b) and not precedes_or_equal(t[a], t[b]):
                return False
    return True


@dataclass(frozen=True)
class OracleBlock:
    start: int
    length: int
    truncated: bool = False

    @property
    def positions(self) -> range:
        return range(self.start, self.start + self.length)


def brute_blocks(m: FenceMap, horizon: int) -> list[OracleBlock]:
    """Maximal constancy runs of the value table; the last one is flagged truncated."""
    if horizon < 1:
        raise ValueError("horizon must be positive")
    t = PrefixTable.of(m, horizon)
    out: list[OracleBlock] = []
    start = 1
    for x in range(2, horizon + 1):
        if t[x] != t[x - 1]:
            out.append(OracleBlock(start, x - start))
            start = x
    out.append(OracleBlock(start, horizon - start + 1, True))
    return out


def brute_singleton_runs(m: FenceMap, horizon: int) -> list[OracleBlock]:
    """Maximal runs of singleton blocks among the complete blocks of the table."""
    blocks = brute_blocks(m, horizon)
    out: list[OracleBlock] = []
    cur = None
    for b in blocks:
        if b.length == 1 and not b.truncated:
            cur = b.start if cur is None else cur
        elif b.truncated and b.length == 1:
            # A singleton at the horizon may continue the run; its end is unknown.
            cur = b.start if cur is None else cur
            out.append(OracleBlock(cur, horizon - cur + 1, True))
            return out
        else:
            if cur is not None:
                out.append(OracleBlock(cur, b.start - cur))
            cur = None
    if cur is not None:
        out.append(OracleBlock(cur, horizon - cur + 1, True))
    return out


@dataclass(frozen=True)
class FiberResult:
    positions: frozenset[int]
    complete: bool


def fiber(m: FenceMap, v: int, horizon: int) -> FiberResult:
    """``{x <= horizon : m(x) == v}``; complete when no later position can hit ``v``."""
    if horizon < 1:
        raise ValueError("horizon must be positive")
    pos = frozenset(x for x in range(1, horizon + 1) if evaluate(m, x) == v)
    complete = False
    if m.tail_drift > 0:
        # One full tail period past both the horizon and the prefix bounds every later value.
        lo = horizon + 1
        hi = max(horizon, m.tail_start - 1) + m.tail_period
        complete = min(evaluate(m, x) for x in range(lo, hi + 1)) > v
    return FiberResult(pos, complete)


def agree_on_prefix(a: FenceMap, b: FenceMap, horizon: int) -> bool:
    return all(evaluate(a, x) == evaluate(b, x) for x in range(1, horizon + 1))


def first_disagreement(a: FenceMap, b: FenceMap, horizon: int) -> int | None:
    for x in range(1, horizon + 1):
        if evaluate(a, x) != evaluate(b, x):
            return x
    return None


def brute_image(m: FenceMap, horizon: int) -> list[int]:
    return sorted(set(PrefixTable.of(m, horizon).values))


def brute_fiber_sizes(m: FenceMap, horizon: int) -> dict[int, int]:
    sizes: dict[int, int] = {}
    for v in PrefixTable.of(m, horizon).values:
        sizes[v] = sizes.get(v, 0) + 1
    return sizes
