"""Combinatorial invariants and class membership for fence-preserving maps.

Everything here is exact: infinite cardinalities are read off the periodic
structure of the tail, never inferred from a finite sample.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from itertools import count, islice
from typing import Callable, Iterator, Union

from .extnat import ALEPH0, ExtNat
from .fencemap import FenceMap, evaluate, is_fence_preserving, min_image, normalize


@dataclass(frozen=True)
class Block:
    """A maximal interval; ``length`` is None for an infinite terminal block."""

    start: int
    length: int | None
    value: int | None = None

    @property
    def end(self) -> int | None:
        return None if self.length is None else self.start + self.length - 1

    @property
    def is_infinite(self) -> bool:
        return self.length is None

    def __contains__(self, x: int) -> bool:
        return x >= self.start and (self.length is None or x < self.start + self.length)


@dataclass(frozen=True)
class PeriodicTail:
    """Blocks repeating every ``spatial_period`` positions, values raised by ``value_drift``.

    ``shapes`` holds ``(offset, length, base_value)`` relative to ``start``.
    """

    start: int
    spatial_period: int
    value_drift: int
    shapes: tuple[tuple[int, int, int | None], ...]


@dataclass(frozen=True)
class InfiniteTail:
    start: int
    value: int | None


@dataclass(frozen=True)
class NoTail:
    """The head lists every interval (only for run streams)."""


Tail = Union[PeriodicTail, InfiniteTail, NoTail]


@dataclass(frozen=True)
class BlockStream:
    """Eventually periodic sequence of disjoint intervals, ordered left to right.

    For :func:`block_stream` the intervals partition the positive integers
    into maximal constancy blocks; for :func:`ms_stream` they are the maximal
    runs of singleton blocks and ``value`` is unused.
    """

    head: tuple[Block, ...]
    tail: Tail

    def __iter__(self) -> Iterator[Block]:
        yield from self.head
        t = self.tail
        if isinstance(t, InfiniteTail):
            yield Block(t.start, None, t.value)
        elif isinstance(t, PeriodicTail):
            for q in count():
                for off, length, value in t.shapes:
                    v = None if value is None else value + q * t.value_drift
                    yield Block(t.start + q * t.spatial_period + off, length, v)

    def block(self, i: int) -> Block:
        """The ``i``-th interval (1-based)."""
        if i < 1:
            raise IndexError(i)
        if i <= len(self.head):
            return self.head[i - 1]
        t = self.tail
        j = i - len(self.head) - 1
        if isinstance(t, InfiniteTail) and j == 0:
            return Block(t.start, None, t.value)
        if isinstance(t, PeriodicTail) and t.shapes:
            q, s = divmod(j, len(t.shapes))
            off, length, value = t.shapes[s]
            v = None if value is None else value + q * t.value_drift
            return Block(t.start + q * t.spatial_period + off, length, v)
        raise IndexError(i)

    @property
    def count(self) -> ExtNat:
        t = self.tail
        if isinstance(t, PeriodicTail) and t.shapes:
            return ALEPH0
        return ExtNat(len(self.head) + (1 if isinstance(t, InfiniteTail) else 0))

    def index_of(self, x: int) -> int | None:
        """1-based index of the interval containing ``x`` (None if in a gap)."""
        starts = [b.start for b in self.head]
        k = bisect.bisect_right(starts, x)
        if k and x in self.head[k - 1]:
            return k
        t = self.tail
        if isinstance(t, InfiniteTail):
            return len(self.head) + 1 if x >= t.start else None
        if isinstance(t, PeriodicTail) and x >= t.start:
            q, off = divmod(x - t.start, t.spatial_period)
            for s, (o, length, _) in enumerate(t.shapes):
                if o <= off < o + length:
                    return len(self.head) + q * len(t.shapes) + s + 1
        return None

    def upto(self, horizon: int) -> list[Block]:
        """Intervals meeting ``[1, horizon]``, the last one clipped to the horizon."""
        out = []
        for b in self:
            if b.start > horizon:
                break
            if b.end is None or b.end > horizon:
                b = Block(b.start, horizon - b.start + 1, b.value)
            out.append(b)
        return out

    def _count(self, pred: Callable[[Block], bool]) -> ExtNat:
        n = sum(1 for b in self.head if pred(b))
        t = self.tail
        if isinstance(t, InfiniteTail):
            n += pred(Block(t.start, None, t.value))
        elif isinstance(t, PeriodicTail):
            if any(pred(Block(t.start + o, length, v)) for o, length, v in t.shapes):
                return ALEPH0
        return ExtNat(n)

    def count_blocks_of_length(self, n: int) -> ExtNat:
        return self._count(lambda b: b.length == n)

    count_runs_of_length = count_blocks_of_length

    def m_star_count(self) -> ExtNat:
        """Number of non-singleton blocks, an infinite terminal block included."""
        return self._count(lambda b: b.length is None or b.length >= 2)

    def big_block_count(self) -> ExtNat:
        """Number of finite blocks longer than 3."""
        return self._count(lambda b: b.length is not None and b.length > 3)

    def all_star_lengths_equal(self, n: int) -> bool:
        return self._count(lambda b: (b.length is None or b.length >= 2) and b.length != n) == 0

    def star_blocks(self) -> Iterator[Block]:
        return (b for b in self if b.length is None or b.length >= 2)

    def periodic_start(self) -> int:
        """First position from which the interval pattern repeats."""
        t = self.tail
        if isinstance(t, (PeriodicTail, InfiniteTail)):
            return t.start
        return (self.head[-1].end + 1) if self.head else 1

    def to_json(self) -> dict:
        t = self.tail
        if isinstance(t, PeriodicTail):
            tail = {
                "kind": "periodic",
                "start": t.start,
                "spatial_period": t.spatial_period,
                "value_drift": t.value_drift,
                "shapes": [list(s) for s in t.shapes],
            }
        elif isinstance(t, InfiniteTail):
            tail = {"kind": "infinite_block", "start": t.start, "value": t.value}
        else:
            tail = {"kind": "none"}
        return {
            "head": [{"start": b.start, "length": b.length, "value": b.value} for b in self.head],
            "tail": tail,
        }


def _runs(values: list[int], first: int) -> list[Block]:
    """Maximal constancy blocks of ``values`` placed at positions ``first, first+1, ...``."""
    out: list[Block] = []
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[j + 1] == values[i]:
            j += 1
        out.append(Block(first + i, j - i + 1, values[i]))
        i = j + 1
    return out


def block_stream(m: FenceMap) -> BlockStream:
    m = normalize(m)
    n, p, d = m.tail_start, m.tail_period, m.tail_drift
    if d == 0 and p == 1:
        # Canonical start guarantees alpha(n - 1) differs from the tail value.
        head = tuple(_runs(list(m.prefix), 1))
        return BlockStream(head, InfiniteTail(n, m.tail_base[0]))
    x = n
    while evaluate(m, x) == evaluate(m, x + 1):
        x += 1
    s0 = x + 1
    head = _runs(m.values(1, s0 - 1), 1)
    shapes = [(b.start - s0, b.length, b.value) for b in _runs(m.values(s0, s0 + p - 1), s0)]
    # Pull head blocks into the periodic part while they repeat the last shape.
    while head:
        off, length, value = shapes[-1]
        h = head[-1]
        if h.start == s0 - length and h.length == length and h.value == value - d:
            head.pop()
            s0 = h.start
            shapes = [(0, length, value - d)] + [(o + length, l, v) for o, l, v in shapes[:-1]]
        else:
            break
    return BlockStream(tuple(head), PeriodicTail(s0, p, d, tuple(shapes)))


def ms_stream(m: FenceMap) -> BlockStream:
    """Maximal runs of singleton blocks."""
    bs = block_stream(m)

    def runs_of(blocks: list[Block]) -> list[Block]:
        out, cur = [], None
        for b in blocks:
            if b.length == 1:
                cur = b.start if cur is None else cur
            else:
                if cur is not None:
                    out.append(Block(cur, b.start - cur))
                cur = None
        if cur is not None:
            out.append(Block(cur, None))
        return out

    t = bs.tail
    if isinstance(t, InfiniteTail):
        runs = runs_of(list(bs.head) + [Block(t.start, None, t.value)])
        return BlockStream(tuple(runs), NoTail())
    assert isinstance(t, PeriodicTail)
    singles = [length == 1 for _, length, _ in t.shapes]
    if all(singles):
        runs = runs_of(list(bs.head) + [Block(t.start, 1)])
        last = runs.pop()
        return BlockStream(tuple(runs), InfiniteTail(last.start, None))
    j = singles.index(False)
    s1 = t.start + t.shapes[j][0]
    before = list(bs.head) + [Block(t.start + o, l, v) for o, l, v in t.shapes[:j]]
    before.append(Block(s1, 2))  # closes any open run
    head_runs = runs_of(before)
    rotated = [Block(s1 + o - t.shapes[j][0], l) for o, l, _ in t.shapes[j:]]
    rotated += [Block(s1 + o - t.shapes[j][0] + t.spatial_period, l) for o, l, _ in t.shapes[:j]]
    rotated.append(Block(s1 + t.spatial_period, 2))
    shapes = tuple((b.start - s1, b.length, None) for b in runs_of(rotated))
    if not shapes:
        return BlockStream(tuple(head_runs), NoTail())
    return BlockStream(tuple(head_runs), PeriodicTail(s1, t.spatial_period, 0, shapes))


# --- fibers -----------------------------------------------------------------


def _value_bound(m: FenceMap) -> int:
    """Above this value every fiber is a translate of one in the first drift window."""
    return max(max(m.tail_base), max(m.prefix, default=0) + 1)


def fiber_positions(m: FenceMap, v: int) -> tuple[int, ...]:
    """Exact fiber of ``v`` for a map with positive drift."""
    if m.tail_drift == 0:
        raise ValueError("fibers of a bounded tail are infinite")
    n, p, d = m.tail_start, m.tail_period, m.tail_drift
    out = [x for x, w in enumerate(m.prefix, 1) if w == v]
    for i, b in enumerate(m.tail_base):
        if v >= b and (v - b) % d == 0:
            out.append(n + i + ((v - b) // d) * p)
    return tuple(sorted(out))


def _is_convex(xs: tuple[int, ...]) -> bool:
    return not xs or xs[-1] - xs[0] + 1 == len(xs)


@dataclass(frozen=True)
class SetReport:
    """Exact description of a set of image values."""

    cardinality: ExtNat
    finite_elements: tuple[int, ...]
    periodic_witness: tuple[int, int] | None = None

    def to_json(self) -> dict:
        return {
            "cardinality": self.cardinality.to_json(),
            "finite_elements": list(self.finite_elements),
            "periodic_witness": None if self.periodic_witness is None else list(self.periodic_witness),
        }


def _value_set(m: FenceMap, pred: Callable[[int], bool]) -> SetReport:
    """Image values ``v`` with ``pred(v)``, where ``pred`` depends only on fibers.

    For positive drift the fiber of ``v + d`` is the fiber of ``v`` shifted by
    the period once ``v`` passes :func:`_value_bound`, so one window of ``d``
    values decides whether the set is infinite.
    """
    m = normalize(m)
    v0 = _value_bound(m)
    lo = min_image(m)
    finite = [v for v in range(lo, v0) if pred(v)]
    periodic = [v for v in range(v0, v0 + m.tail_drift) if pred(v)]
    if periodic:
        return SetReport(ALEPH0, tuple(finite), (periodic[0], m.tail_drift))
    return SetReport(ExtNat(len(finite)), tuple(finite))


def _bounded_fiber_sizes(m: FenceMap) -> dict[int, ExtNat]:
    """Fiber sizes of a map with zero drift (finite image)."""
    sizes: dict[int, ExtNat] = {}
    for v in m.prefix:
        sizes[v] = sizes.get(v, ExtNat(0)) + 1
    for v in m.tail_base:
        sizes[v] = ALEPH0
    return sizes


def r_set(m: FenceMap) -> SetReport:
    """Image values whose fiber is not an interval."""
    m = normalize(m)
    if m.tail_drift == 0:
        out = []
        for v in sorted(set(m.prefix) | set(m.tail_base)):
            pos = tuple(x for x, w in enumerate(m.prefix, 1) if w == v)
            if v in m.tail_base:
                # An infinite fiber is an interval only for a constant tail
                # that no earlier position shares (canonical start).
                if m.tail_period > 1 or pos:
                    out.append(v)
            elif not _is_convex(pos):
                out.append(v)
        return SetReport(ExtNat(len(out)), tuple(out))
    return _value_set(m, lambda v: not _is_convex(fiber_positions(m, v)))


def q_set(m: FenceMap) -> SetReport:
    """Image values ``x`` with both ``x`` and ``x + 1`` having fibers of size >= 3."""
    m = normalize(m)
    if m.tail_drift == 0:
        sizes = _bounded_fiber_sizes(m)
        out = [v for v in sorted(sizes) if sizes[v] >= 3 and sizes.get(v + 1, ExtNat(0)) >= 3]
        return SetReport(ExtNat(len(out)), tuple(out))
    return _value_set(
        m, lambda v: len(fiber_positions(m, v)) >= 3 and len(fiber_positions(m, v + 1)) >= 3
    )


def max_fiber_size(m: FenceMap) -> ExtNat:
    m = normalize(m)
    if m.tail_drift == 0:
        return max(_bounded_fiber_sizes(m).values())
    v0 = _value_bound(m)
    return ExtNat(max(len(fiber_positions(m, v)) for v in range(min_image(m), v0 + m.tail_drift)))


def nb_size(m: FenceMap) -> ExtNat:
    """Number of positions ``a`` with ``alpha(a) == alpha(a + 1)``."""
    bs = block_stream(m)
    total = ExtNat(0)
    for b in bs.head:
        total = total + (b.length - 1)
    t = bs.tail
    if isinstance(t, InfiniteTail):
        return ALEPH0
    if any(length >= 2 for _, length, _ in t.shapes):
        return ALEPH0
    return total


def c_value(m: FenceMap) -> ExtNat:
    """Size of the union of all fibers with at least two elements."""
    m = normalize(m)
    if m.tail_drift == 0:
        return ALEPH0
    v0 = _value_bound(m)
    if any(len(fiber_positions(m, v)) >= 2 for v in range(v0, v0 + m.tail_drift)):
        return ALEPH0
    sizes = (len(fiber_positions(m, v)) for v in range(min_image(m), v0))
    return ExtNat(sum(s for s in sizes if s >= 2))


def rank(m: FenceMap) -> ExtNat:
    m = normalize(m)
    if m.tail_drift > 0:
        return ALEPH0
    return ExtNat(len(set(m.prefix) | set(m.tail_base)))


def image_values(m: FenceMap, limit: int | None = None) -> list[int]:
    """Sorted image, truncated to values <= ``limit`` when the image is infinite."""
    m = normalize(m)
    if m.tail_drift == 0:
        return sorted(set(m.prefix) | set(m.tail_base))
    if limit is None:
        raise ValueError("infinite image needs a limit")
    v0 = _value_bound(m)
    out = []
    for v in range(min_image(m), limit + 1):
        if v >= v0:
            # Fiber sizes repeat with period d from v0 on.
            r = v0 + (v - v0) % m.tail_drift
            if fiber_positions(m, r):
                out.append(v)
        elif fiber_positions(m, v):
            out.append(v)
    return out


def nb_positions(m: FenceMap, limit: int) -> list[int]:
    return [a for a in range(1, limit + 1) if evaluate(m, a) == evaluate(m, a + 1)]


def eventual_monotone_index(m: FenceMap) -> int:
    """Least ``k`` with ``alpha`` nondecreasing on ``[k, inf)``.

    Requires infinite rank and finitely many non-convex fibers.
    """
    m = normalize(m)
    if m.tail_drift == 0:
        raise ValueError("eventual monotonicity needs infinite rank")
    if not r_set(m).cardinality.is_finite:
        raise ValueError("eventual monotonicity needs finitely many non-convex fibers")
    n, p = m.tail_start, m.tail_period
    descents = [x for x in range(1, n + p) if evaluate(m, x) > evaluate(m, x + 1)]
    if any(x >= n for x in descents):  # pragma: no cover - excluded by the hypotheses
        raise ValueError("tail is not eventually monotone")
    return descents[-1] + 1 if descents else 1


# --- classification ---------------------------------------------------------


@dataclass(frozen=True)
class KClass:
    """``kind`` is 'not_in_P', 'K' (with ``l``) or 'K_inf'."""

    kind: str
    l: int | None = None

    def __str__(self) -> str:
        if self.kind == "K":
            return f"K({self.l})"
        return self.kind

    def to_json(self) -> dict:
        return {"kind": self.kind, "l": self.l}


NOT_IN_P = KClass("not_in_P")
K_INF = KClass("K_inf")


def in_omega(m: FenceMap, n: int) -> bool:
    head = [evaluate(m, x) for x in range(1, n + 1)]
    return head[0] >= n and len(set(head)) == n


@dataclass(frozen=True)
class ClassReport:
    n: int
    in_theta: bool
    in_lambda: bool
    in_gamma: bool
    in_delta: bool
    in_B: bool
    in_P: bool
    rank: ExtNat
    nb_size: ExtNat
    c_value: ExtNat
    k_class: KClass
    in_omega_n: bool
    in_lambda_n: bool
    in_theta_n: bool
    in_delta_n: bool
    in_H_n: bool
    in_G_n: bool
    g_reasons: tuple[str, ...] = field(default=())
    h_reasons: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            if isinstance(v, (ExtNat, KClass)):
                out[k] = v.to_json()
            elif isinstance(v, tuple):
                out[k] = list(v)
            else:
                out[k] = v
        return out


def k_class(m: FenceMap) -> KClass:
    if not in_p(m):
        return NOT_IN_P
    t = ms_stream(m).tail
    if isinstance(t, PeriodicTail):
        return KClass("K", min(length for _, length, _ in t.shapes))
    return K_INF


def in_p(m: FenceMap) -> bool:
    return (
        rank(m) == ALEPH0
        and block_stream(m).big_block_count().is_finite
        and r_set(m).cardinality.is_finite
        and q_set(m).cardinality.is_finite
    )


def min_nb(m: FenceMap) -> int | None:
    for b in block_stream(m):
        if b.length is None or b.length >= 2:
            return b.start
    return None


def classify(m: FenceMap, n: int = 1) -> ClassReport:
    from . import generators as gen

    if n < 1:
        raise ValueError("class parameter n must be >= 1")
    if not is_fence_preserving(m):
        raise ValueError("classification needs a fence-preserving map")
    m = normalize(m)
    bs = block_stream(m)
    rk, nb, c = rank(m), nb_size(m), c_value(m)
    r = r_set(m).cardinality
    theta = r == 0
    lam = nb == 0 and c > 0
    gamma = theta and rk == ALEPH0 and max_fiber_size(m) >= 3
    stars = bs.m_star_count()
    delta = stars == ALEPH0
    in_b = nb == 2 and c == 3 and rk == ALEPH0 and min_image(m) == 1
    kc = k_class(m)
    omega = in_omega(m, n)

    h = []
    if m == gen.xi():
        h.append("xi")
    if rk.is_finite and rk.value >= n and m == gen.alpha_gen(rk.value):
        h.append(f"alpha_{rk.value}")
    if in_b:
        k = min_nb(m)
        if k >= n and m == gen.beta_gen(k):
            h.append(f"beta_{k}")
    if lam and omega:
        h.append("Lambda_n")
    if delta and omega:
        h.append("Delta_n")

    g = []
    if m == gen.xi():
        g.append("g1")
    if lam and omega:
        g.append("g2")
    if theta and omega and stars in (ExtNat(1), ALEPH0) and bs.all_star_lengths_equal(3):
        g.append("g3")

    return ClassReport(
        n=n,
        in_theta=theta,
        in_lambda=lam,
        in_gamma=gamma,
        in_delta=delta,
        in_B=in_b,
        in_P=kc != NOT_IN_P,
        rank=rk,
        nb_size=nb,
        c_value=c,
        k_class=kc,
        in_omega_n=omega,
        in_lambda_n=lam and omega,
        in_theta_n=theta and omega,
        in_delta_n=delta and omega,
        in_H_n=bool(h),
        in_G_n=bool(g),
        g_reasons=tuple(g),
        h_reasons=tuple(h),
    )


def same_blocks(a: FenceMap, b: FenceMap) -> bool:
    """Whether ``a`` and ``b`` have the same maximal constancy blocks."""
    a, b = normalize(a), normalize(b)
    from math import lcm

    hi = max(a.tail_start, b.tail_start) + 2 * lcm(a.tail_period, b.tail_period) + 1
    return all(
        (evaluate(a, x) == evaluate(a, x + 1)) == (evaluate(b, x) == evaluate(b, x + 1))
        for x in range(1, hi + 1)
    )


def first_blocks(m: FenceMap, k: int) -> list[Block]:
    return list(islice(block_stream(m), k))
