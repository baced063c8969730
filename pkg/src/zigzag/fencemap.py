"""Eventually quasi-periodic self-maps of the positive integers.

A :class:`FenceMap` is stored as a finite prefix followed by a tail that
repeats a fixed pattern of ``tail_period`` values, each repetition raised by
``tail_drift``::

    x < N:   alpha(x) = prefix[x - 1]
    x >= N:  alpha(x) = base[(x - N) % p] + d * ((x - N) // p)

Maps are applied left to right, so ``compose(a, b)`` is ``x -> b(a(x))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Callable, Iterable, Sequence


class MapError(ValueError):
    """Raised for structurally invalid map descriptions."""


@dataclass(frozen=True, eq=False)
class FenceMap:
    prefix: tuple[int, ...]
    tail_start: int
    tail_period: int
    tail_drift: int
    tail_base: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(int(v) for v in self.prefix))
        object.__setattr__(self, "tail_base", tuple(int(v) for v in self.tail_base))
        if self.tail_start < 1:
            raise MapError(f"tail_start must be >= 1, got {self.tail_start}")
        if len(self.prefix) != self.tail_start - 1:
            raise MapError(
                f"prefix has {len(self.prefix)} values but tail_start={self.tail_start}"
            )
        if self.tail_period < 1:
            raise MapError(f"tail_period must be >= 1, got {self.tail_period}")
        if len(self.tail_base) != self.tail_period:
            raise MapError(
                f"tail_base has {len(self.tail_base)} values but tail_period={self.tail_period}"
            )
        if self.tail_drift < 0:
            raise MapError("tail_drift must be non-negative")
        if any(v < 1 for v in self.prefix) or any(v < 1 for v in self.tail_base):
            raise MapError("all values must be >= 1")

    @classmethod
    def from_function(
        cls, f: Callable[[int], int], start: int, period: int, check_periods: int = 3
    ) -> FenceMap:
        """Tabulate ``f`` assuming it is quasi-periodic from ``start`` with ``period``.

        The drift is read off the samples and the assumption is checked on
        ``check_periods`` further periods; a mismatch raises :class:`MapError`.
        """
        start = max(1, start)
        prefix = [f(x) for x in range(1, start)]
        base = [f(x) for x in range(start, start + period)]
        drift = f(start + period) - base[0]
        for x in range(start, start + check_periods * period):
            if f(x + period) != f(x) + drift:
                raise MapError(
                    f"function is not quasi-periodic from {start} with period {period} (x={x})"
                )
        return normalize(cls(tuple(prefix), start, period, drift, tuple(base)))

    @classmethod
    def affine(cls, shift: int) -> FenceMap:
        """The map ``x -> x + shift`` (``shift >= 0``)."""
        return cls((), 1, 1, 1, (1 + shift,))

    def __call__(self, x: int) -> int:
        return evaluate(self, x)

    def __mul__(self, other: FenceMap) -> FenceMap:
        return compose(self, other)

    def values(self, lo: int, hi: int) -> list[int]:
        """Values on the closed interval ``[lo, hi]``."""
        return [evaluate(self, x) for x in range(lo, hi + 1)]

    @cached_property
    def canonical(self) -> FenceMap:
        return normalize(self)

    def _key(self) -> tuple:
        c = self.canonical
        return (c.prefix, c.tail_start, c.tail_period, c.tail_drift, c.tail_base)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FenceMap):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return (
            f"FenceMap(prefix={list(self.prefix)}, tail_start={self.tail_start}, "
            f"tail_period={self.tail_period}, tail_drift={self.tail_drift}, "
            f"tail_base={list(self.tail_base)})"
        )

    def to_json(self) -> dict:
        return {
            "prefix": list(self.prefix),
            "tail_start": self.tail_start,
            "tail_period": self.tail_period,
            "tail_drift": self.tail_drift,
            "tail_base": list(self.tail_base),
        }

    @classmethod
    def from_json(cls, data: dict) -> FenceMap:
        try:
            return cls(
                tuple(data["prefix"]),
                int(data["tail_start"]),
                int(data["tail_period"]),
                int(data["tail_drift"]),
                tuple(data["tail_base"]),
            )
        except KeyError as exc:
            raise MapError(f"missing field {exc.args[0]!r}") from None


IDENTITY = FenceMap((), 1, 1, 1, (1,))


def evaluate(m: FenceMap, x: int) -> int:
    if x < 1:
        raise ValueError(f"maps are defined on positive integers, got {x}")
    if x < m.tail_start:
        return m.prefix[x - 1]
    q, r = divmod(x - m.tail_start, m.tail_period)
    return m.tail_base[r] + m.tail_drift * q


def check_window(m: FenceMap) -> int:
    """Last position whose local conditions decide fence preservation."""
    return m.tail_start + 2 * m.tail_period + 1


def is_fence_preserving(m: FenceMap) -> bool:
    # Both local conditions repeat with spatial period 2p once past the
    # tail start (parity of x and of alpha(x) both flip back after 2p).
    hi = check_window(m)
    v = [0] + m.values(1, hi + 1)
    for x in range(1, hi + 1):
        if abs(v[x] - v[x + 1]) > 1:
            return False
        if x >= 2 and (x - v[x]) % 2 and not (v[x - 1] == v[x] == v[x + 1]):
            return False
    return True


def _divisors(n: int) -> list[int]:
    return [q for q in range(1, n + 1) if n % q == 0]


def normalize(m: FenceMap) -> FenceMap:
    n, p, d = m.tail_start, m.tail_period, m.tail_drift
    for q in _divisors(p):
        if (d * q) % p:
            continue
        dq = d * q // p
        if all(evaluate(m, n + i + q) == evaluate(m, n + i) + dq for i in range(p)):
            break
    else:  # pragma: no cover - q == p always matches
        raise MapError("internal error: no period folds")
    start = n
    while start > 1 and evaluate(m, start - 1) + dq == evaluate(m, start - 1 + q):
        start -= 1
    prefix = tuple(evaluate(m, x) for x in range(1, start))
    base = tuple(evaluate(m, x) for x in range(start, start + q))
    if (prefix, start, q, dq, base) == (m.prefix, n, p, d, m.tail_base):
        return m
    return FenceMap(prefix, start, q, dq, base)


def equals(a: FenceMap, b: FenceMap) -> bool:
    return a == b


def compose(a: FenceMap, b: FenceMap) -> FenceMap:
    """The map ``x -> b(a(x))``."""
    na, pa, da = a.tail_start, a.tail_period, a.tail_drift
    nb, pb, db = b.tail_start, b.tail_period, b.tail_drift
    if da > 0:
        mult = pb // gcd(da, pb)
        period = mult * pa
        drift = (mult * da // pb) * db
        start = na
        # a(x + period) = a(x) + mult*da, so one clear window suffices.
        while any(evaluate(a, y) < nb for y in range(start, start + period)):
            start += 1
    else:
        period, drift, start = pa, 0, na
    prefix = tuple(evaluate(b, evaluate(a, x)) for x in range(1, start))
    base = tuple(evaluate(b, evaluate(a, x)) for x in range(start, start + period))
    return normalize(FenceMap(prefix, start, period, drift, base))


def compose_all(maps: Iterable[FenceMap]) -> FenceMap:
    result = IDENTITY
    for m in maps:
        result = compose(result, m)
    return result


def power(m: FenceMap, k: int) -> FenceMap:
    if k < 1:
        raise ValueError(f"power exponent must be >= 1, got {k}")
    result, base = None, m
    while k:
        if k & 1:
            result = base if result is None else compose(result, base)
        k >>= 1
        if k:
            base = compose(base, base)
    return result


def min_image(m: FenceMap) -> int:
    """Smallest value taken (the tail minimum is attained in its first period)."""
    return min(m.prefix + m.tail_base)


def from_values(values: Sequence[int]) -> FenceMap:
    """Map agreeing with ``values`` on [1, len] and eventually constant at the last value."""
    if not values:
        raise MapError("need at least one value")
    return normalize(FenceMap(tuple(values[:-1]), len(values), 1, 0, (values[-1],)))
