"""Constructive factorizations into generating sets, each checked by recomposition.

Words are read left to right: the word ``g1 g2 ... gk`` denotes the map
``x -> gk(...g2(g1(x)))``, matching :func:`zigzag.fencemap.compose`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import lcm
from typing import Callable, Iterable, Sequence

from .extnat import ALEPH0, ExtNat
from .fencemap import (
    FenceMap,
    MapError,
    compose,
    compose_all,
    evaluate,
    is_fence_preserving,
    min_image,
    normalize,
    power,
)
from .generators import (
    AlphaGen,
    BetaGen,
    ClassTag,
    DeltaGen,
    Explicit,
    GeneratorSymbol,
    LambdaGen,
    Xi,
    alpha_gen,
    beta_gen,
    xi,
)
from .invariants import (
    Block,
    BlockStream,
    InfiniteTail,
    PeriodicTail,
    block_stream,
    classify,
    c_value,
    fiber_positions,
    k_class,
    same_blocks,
)

SCHEMA_VERSION = 1
SCHEMES = ("theta-lambda", "h", "g", "delta", "ksplit")


class FactorizationError(ValueError):
    """The input violates a precondition of the requested factorization."""


# --- words --------------------------------------------------------------------


@dataclass(frozen=True)
class TargetClass:
    """Which generating set a word is drawn from; ``n`` is the class parameter."""

    scheme: str
    n: int | None = None

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")

    def to_json(self) -> dict:
        return {"scheme": self.scheme, "n": self.n}


@dataclass(frozen=True)
class GeneratorWord:
    factors: tuple[GeneratorSymbol, ...]
    target_class: TargetClass

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("a generator word needs at least one factor")

    def compose(self) -> FenceMap:
        return compose_all(f.to_map() for f in self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def render(self) -> str:
        return "·".join(render_symbol(f) for f in self.factors)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "target_class": self.target_class.to_json(),
            "factors": [symbol_to_json(f) for f in self.factors],
        }

    @classmethod
    def from_json(cls, data: dict) -> GeneratorWord:
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported word schema_version {data.get('schema_version')!r}")
        tc = data["target_class"]
        return cls(
            tuple(symbol_from_json(f) for f in data["factors"]),
            TargetClass(tc["scheme"], tc.get("n")),
        )


_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _sub(k: int | None) -> str:
    return "" if k is None else str(k).translate(_SUB)


_TAG_GLYPH = {"theta": "Θ", "lambda_n": "Λ", "delta_n": "Δ", "g3": "Γ", "k_above": "K>"}


def render_symbol(f: GeneratorSymbol) -> str:
    if isinstance(f, Xi):
        return "ξ"
    if isinstance(f, Explicit):
        tag = f.certified_class
        return f"γ[{_TAG_GLYPH[tag.name]}{_sub(tag.n)}]"
    glyph = {AlphaGen: "α", BetaGen: "β", LambdaGen: "λ", DeltaGen: "δ"}[type(f)]
    return glyph + _sub(f.k)


_KINDS = {"alpha": AlphaGen, "beta": BetaGen, "lambda": LambdaGen, "delta": DeltaGen}


def symbol_to_json(f: GeneratorSymbol) -> dict:
    if isinstance(f, Xi):
        return {"kind": "xi"}
    if isinstance(f, Explicit):
        return {
            "kind": "explicit",
            "map": f.map.to_json(),
            "certified_class": f.certified_class.to_json(),
        }
    kind = next(k for k, t in _KINDS.items() if isinstance(f, t))
    return {"kind": kind, "k": f.k}


def symbol_from_json(data: dict) -> GeneratorSymbol:
    kind = data.get("kind")
    if kind == "xi":
        return Xi()
    if kind == "explicit":
        return Explicit(FenceMap.from_json(data["map"]), ClassTag.from_json(data["certified_class"]))
    if kind in _KINDS:
        return _KINDS[kind](int(data["k"]))
    raise ValueError(f"unknown factor kind {kind!r}")


# --- table helpers --------------------------------------------------------------


def _from_table(f: Callable[[int], int], start: int, period: int) -> FenceMap:
    """Tabulate ``f``, which must be quasi-periodic from ``start`` with ``period``."""
    return FenceMap.from_function(f, start, period, check_periods=4)


def _shift_values(m: FenceMap, s: int) -> FenceMap:
    return FenceMap(
        tuple(v + s for v in m.prefix), m.tail_start, m.tail_period, m.tail_drift,
        tuple(v + s for v in m.tail_base),
    )


def _tail_shape(bs: BlockStream) -> tuple[int, int]:
    """``(t0, P)``: the block pattern repeats with spatial period ``P`` from ``t0``."""
    t = bs.tail
    if isinstance(t, PeriodicTail):
        return t.start, t.spatial_period
    if isinstance(t, InfiniteTail):
        return t.start, 1
    raise AssertionError("block streams always have a tail")


def _table(bs: BlockStream, horizon: int) -> list[Block]:
    return bs.upto(horizon)


def _relabel(
    m: FenceMap, first: int, collapse: Callable[[int, Block], bool], start: int, period: int
) -> FenceMap:
    """Map sending collapsed blocks to one value and other positions to fresh values.

    Values increase by one per output block, beginning at ``first``.
    ``collapse(i, block)`` decides for the ``i``-th block (1-based).
    """
    horizon = start + 6 * period + 2
    values = [0]
    v = first - 1
    for i, b in enumerate(block_stream(m).upto(horizon), 1):
        if b.length is None:  # pragma: no cover - upto clips infinite blocks
            raise AssertionError
        if collapse(i, b) or b.length == 1:
            v += 1
            values += [v] * b.length
        else:
            for _ in range(b.length):
                v += 1
                values.append(v)
    return _from_table(lambda x: values[x], start, period)


def block_index_map(m: FenceMap, first: int) -> FenceMap:
    """``x -> first + i - 1`` on the ``i``-th maximal constancy block of ``m``."""
    t0, p = _tail_shape(block_stream(m))
    return _relabel(m, first, lambda i, b: True, t0, p)


def _least_above(n: int, parity: int) -> int:
    """Least integer greater than ``n`` congruent to ``parity`` mod 2."""
    k = n + 1
    return k if k % 2 == parity % 2 else k + 1


def _least_even_above(n: int) -> int:
    return _least_above(n, 0)


def _least_odd_above(n: int) -> int:
    return _least_above(n, 1)


# --- completion along a convex-fibered factor -----------------------------------


def _min_preimage(g: FenceMap, w: int) -> int:
    if g.tail_drift > 0:
        pos = fiber_positions(g, w)
        if pos:
            return pos[0]
    else:
        for x in range(1, g.tail_start + g.tail_period):
            if evaluate(g, x) == w:
                return x
    raise ValueError(f"{w} is not in the image")


def _pullback(g: FenceMap, a: FenceMap) -> FenceMap:
    """``w -> a(min g^-1(w))`` on the image of ``g``, extended with slope one off it.

    Below the image the values climb away from the value at the image
    minimum; above a finite image they climb away from the value at its
    maximum.
    """
    g, a = normalize(g), normalize(a)
    lo = min_image(g)
    at_lo = evaluate(a, _min_preimage(g, lo))
    if g.tail_drift == 0:
        hi = max(g.prefix + g.tail_base)
        at_hi = evaluate(a, _min_preimage(g, hi))
        start, period = hi + 1, 1
    else:
        hi, at_hi = None, None
        span = lcm(g.tail_period, a.tail_period)
        period = (span // g.tail_period) * g.tail_drift
        reach = max(g.tail_start, a.tail_start) + span
        start = max(evaluate(g, y) for y in range(1, reach + 1)) + 1

    def f(w: int) -> int:
        if w < lo:
            return at_lo + (lo - w)
        if hi is not None and w > hi:
            return at_hi + (w - hi)
        return evaluate(a, _min_preimage(g, w))

    return _from_table(f, start, period)


def complete_from_theta(gamma1: FenceMap, alpha: FenceMap, n: int) -> FenceMap:
    """The factor ``g2`` in the set of injective-on-neighbours maps with ``alpha = gamma1 g2``."""
    if not is_fence_preserving(gamma1) or not is_fence_preserving(alpha):
        raise FactorizationError("both maps must be fence-preserving")
    rep = classify(gamma1, 1)
    if not rep.in_theta:
        raise FactorizationError("first factor must have convex fibers")
    if not same_blocks(gamma1, alpha):
        raise FactorizationError("first factor and target have different constancy blocks")
    if min_image(gamma1) < n:
        raise FactorizationError(f"image of first factor must stay >= {n}")
    g2 = _pullback(gamma1, alpha)
    if not is_fence_preserving(g2) or not classify(g2, n).in_lambda_n:
        raise FactorizationError(
            "completion is not injective-on-neighbours with a collision in the required "
            f"class for n={n} (image minimum {min_image(gamma1)} is too small)"
        )
    return g2


def theta_lambda_factor(alpha: FenceMap, n: int) -> tuple[FenceMap, FenceMap]:
    """Split ``alpha`` as a convex-fibered map followed by a class-``n`` neighbour-injective map."""
    _require_valid(alpha, n)
    k = _least_above(n, evaluate(alpha, 1))
    g1 = block_index_map(alpha, k)
    return g1, complete_from_theta(g1, alpha, n)


def _require_valid(alpha: FenceMap, n: int | None) -> None:
    if not is_fence_preserving(alpha):
        raise FactorizationError("input map is not fence-preserving")
    if n is not None and (not isinstance(n, int) or n < 1):
        raise FactorizationError(f"class parameter must be a positive integer, got {n!r}")


# --- delta words ------------------------------------------------------------------


def _delta_factors(m: int, n: int) -> list[GeneratorSymbol]:
    m1 = max(m, n)
    m2 = 2 * m1 + 1
    if m == 1 and n == 1:
        return [Xi(), BetaGen(1)]
    if m == 1:
        return [Xi()] * m1 + [BetaGen(m2 - 2), LambdaGen(m2 - 2)]
    if m % 2:
        return [Xi()] * m1 + [BetaGen(m2)] * ((m - 1) // 2) + [LambdaGen(m2)]
    return [Xi()] * m1 + [BetaGen(m2 - 1)] * (m // 2) + [LambdaGen(m2 - 2)]


def delta_word(m: int, n: int) -> GeneratorWord:
    if m < 1 or n < 1:
        raise FactorizationError("delta_word needs m, n >= 1")
    return GeneratorWord(tuple(_delta_factors(m, n)), TargetClass("delta", n))


# --- words for maps with finitely many collapsed blocks ----------------------------


def _finite_star_blocks(bs: BlockStream) -> list[Block]:
    stars = [b for b in bs.head if b.length >= 2]
    t = bs.tail
    if isinstance(t, InfiniteTail):
        stars.append(Block(t.start, None, t.value))
    elif isinstance(t, PeriodicTail) and any(length >= 2 for _, length, _ in t.shapes):
        raise FactorizationError("map has infinitely many collapsed blocks")
    return stars


def _star_factors(stars: Sequence[Block], k1: int, offset: int) -> list[GeneratorSymbol]:
    """beta-powers (and a final alpha for an infinite block) collapsing shifted blocks.

    Block ``i`` sits at ``k_i + offset`` after the preceding factors, where
    ``k_{i+1} = k_i + min(A_{i+1}) - max(A_i)``.
    """
    out: list[GeneratorSymbol] = []
    k = k1
    for i, b in enumerate(stars):
        if i:
            k += b.start - stars[i - 1].end
        j = k + offset
        if b.is_infinite:
            out.append(AlphaGen(j))
        else:
            out += [BetaGen(j)] * (b.length // 2)
    return out


def _finite_star_prefix(alpha: FenceMap, n: int) -> list[GeneratorSymbol]:
    """Factors of a convex-fibered map with the same blocks as ``alpha`` and image above ``n``."""
    k1 = _least_odd_above(n)
    half = (k1 - 1) // 2
    stars = _finite_star_blocks(block_stream(alpha))
    if not stars:
        return [Xi()] * half
    a1 = stars[0]
    if a1.start != 1:
        return [Xi()] * half + _star_factors(stars, k1, a1.start - 1)
    if a1.is_infinite:
        # Constant map: the collapsed value must share the constant's parity.
        k = _least_above(n, a1.value)
        return [Xi()] * (k // 2) + [AlphaGen(k)]
    m1 = a1.end
    head = _delta_factors(m1, n) + [Xi()] * half
    rest = _star_factors(stars, k1, 0 if m1 % 2 else 1)
    # The first entry of ``rest`` describes A_1, which the delta factors already collapsed.
    return head + rest[a1.length // 2 :]


def non_delta_word(alpha: FenceMap, n: int) -> GeneratorWord:
    _require_valid(alpha, n)
    prefix = _finite_star_prefix(alpha, n)
    g1 = compose_all(f.to_map() for f in prefix)
    last = complete_from_theta(g1, alpha, n)
    return GeneratorWord(tuple(prefix) + (Explicit(last, ClassTag("lambda_n", n)),), TargetClass("h", n))


# --- H-chain words -------------------------------------------------------------------


def _named_member(alpha: FenceMap, n: int) -> GeneratorSymbol | None:
    if alpha == xi():
        return Xi()
    rep = classify(alpha, n)
    if rep.rank.is_finite and rep.rank.value >= n and alpha == alpha_gen(rep.rank.value):
        return AlphaGen(rep.rank.value)
    if rep.in_B:
        k = next(b.start for b in block_stream(alpha) if b.length != 1)
        if k >= n and alpha == beta_gen(k):
            return BetaGen(k)
    return None


def _blocks_before(bs: BlockStream, pred: Callable[[Block], bool]) -> tuple[list[Block], Block]:
    """All blocks up to and including the first satisfying ``pred``."""
    seen = []
    for b in bs:
        seen.append(b)
        if pred(b):
            return seen, b
    raise AssertionError("unreachable for infinite streams")  # pragma: no cover


def h_word(alpha: FenceMap, n: int) -> GeneratorWord:
    _require_valid(alpha, n)
    target = TargetClass("h", n)
    named = _named_member(alpha, n)
    if named is not None:
        return GeneratorWord((named,), target)
    bs = block_stream(alpha)
    if bs.m_star_count().is_finite:
        return non_delta_word(alpha, n)
    if len({evaluate(alpha, x) for x in range(1, n + 1)}) == n:
        k1 = _least_above(n, evaluate(alpha, 1))
        g = block_index_map(alpha, k1)
        last = complete_from_theta(g, alpha, n)
        return GeneratorWord(
            (Explicit(g, ClassTag("delta_n", n)), Explicit(last, ClassTag("lambda_n", n))), target
        )
    # Some collapse happens inside [1, n]: keep positions below the first
    # collapsed block beyond n apart, and fold the earlier collapsed blocks
    # afterwards with beta-powers.
    k1 = _least_odd_above(n)
    blocks, a_s = _blocks_before(bs, lambda b: b.start > n and b.length != 1)
    ps = a_s.start
    s_index = len(blocks)
    t0, p = _tail_shape(bs)

    def g0_collapse(i: int, b: Block) -> bool:
        return i >= s_index

    g0 = _relabel(alpha, k1, g0_collapse, max(t0, ps), p)
    earlier = [b for b in blocks[:-1] if b.length >= 2]
    factors: list[GeneratorSymbol] = [Explicit(g0, ClassTag("delta_n", n))]
    if earlier:
        b1 = earlier[0]
        if b1.start == 1:
            offset = 0 if b1.length % 2 else -1
        else:
            offset = b1.start - 1
        factors += _star_factors(earlier, k1, offset)
    beta = compose_all(f.to_map() for f in factors)
    last = complete_from_theta(beta, alpha, n)
    return GeneratorWord(tuple(factors) + (Explicit(last, ClassTag("lambda_n", n)),), target)


# --- G-chain words ---------------------------------------------------------------------


def _expand_alpha(k: int, n: int) -> list[GeneratorSymbol]:
    l = _least_even_above(k)
    g1 = normalize(FenceMap(tuple(l + x for x in range(1, k)), k, 2, 0, (l + k, l + k + 1)))
    g2 = _shift_values(beta_gen(l + k), l)
    return [
        Explicit(g1, ClassTag("lambda_n", n)),
        Explicit(normalize(g2), ClassTag("g3", n)),
        LambdaGen(2 * l + 1),
    ]


def _expand_beta(k: int, n: int) -> list[GeneratorSymbol]:
    l = _least_even_above(k)
    return [Explicit(normalize(_shift_values(beta_gen(k), l)), ClassTag("g3", n)), LambdaGen(l + 1)]


def _star_list(bs: BlockStream, upto: int) -> list[Block]:
    out = []
    for b in bs:
        if b.start > upto:
            break
        if b.length is None or b.length >= 2:
            out.append(b)
    return out


def _expand_delta_member(d: FenceMap, n: int) -> list[GeneratorSymbol]:
    """Factors (two neighbour-injective maps, one triple-collapser, one completion) of ``d``.

    ``d`` has infinitely many collapsed blocks ``A_i = [p_i, p_i + l_i - 1]``.
    The first map folds every ``A_i`` with ``i >= 2`` onto a triple of
    consecutive values, the second folds ``A_1`` the same way, and the third
    collapses all those triples.
    """
    bs = block_stream(d)
    t0, p = _tail_shape(bs)
    l = _least_even_above(evaluate(d, 1))
    first_stars = _star_list(bs, t0 + 3 * p)
    p1, l1 = first_stars[0].start, first_stars[0].length
    p2 = first_stars[1].start
    c = 1 if l1 % 2 == 0 else 0

    start1 = max(t0, p2) + p
    horizon = start1 + 12 * p + 2
    stars = _star_list(bs, horizon + p)

    # gamma_1 on positions, and the fold bases k_i.
    g1_vals = [0] + [l + x for x in range(1, p2)]
    ks = [None, None]  # ks[i] = k_i for i >= 2 (1-based)
    shift = 0  # running sum of (l_j - 3) over folded blocks
    for i in range(1, len(stars)):
        a = stars[i]
        k = l + a.start - shift
        ks.append(k)
        folded = [k + (j % 2) for j in range(a.length - 1)] + [k + 2]
        g1_vals += folded
        shift += a.length - 3
        nxt = stars[i + 1].start if i + 1 < len(stars) else horizon + p + 1
        g1_vals += [l + x - shift for x in range(a.start + a.length, nxt)]
    g1 = _from_table(lambda x: g1_vals[x], start1, p)

    # gamma_2 folds the image of A_1.
    top = 2 * l + p1 + l1 - 3

    def g2f(x: int) -> int:
        if x <= l + p1 - 1 - c:
            return l + x + l1 - 3 + c
        if x <= l + p1 + l1 - 2:
            return top + ((x - (l + p1 - c)) % 2)
        return l + x

    g2 = _from_table(g2f, l + p1 + l1, 1)

    # gamma_3 collapses the triples.
    i0 = next(i for i in range(2, len(stars) + 1) if stars[i - 1].start >= start1)
    stars_per_period = sum(1 for _, length, _ in bs.tail.shapes if length >= 2)
    period3 = ks[i0 + stars_per_period] - ks[i0]
    start3 = l + ks[i0]
    limit3 = start3 + 6 * period3 + 2
    if l + ks[-1] < limit3:  # pragma: no cover - horizon chosen generously
        raise AssertionError("star table too short")

    def g3f(x: int) -> int:
        if x < top:
            return l + x
        if x <= top + 2:
            return l + top
        if x < l + ks[2]:
            return l + x - 2
        i = 2
        while i + 1 < len(ks) and l + ks[i + 1] <= x:
            i += 1
        if x <= l + ks[i] + 2:
            return 2 * l + ks[i] - 2 * (i - 1)
        return l + x - 2 * i

    g3 = _from_table(g3f, start3, period3)

    out: list[GeneratorSymbol] = []
    for g in (g1, g2):
        if c_value(g) == 0:
            out += [Xi()] * (l // 2)
        else:
            out.append(Explicit(g, ClassTag("lambda_n", n)))
    out.append(Explicit(g3, ClassTag("g3", n)))
    beta = compose_all(f.to_map() for f in out)
    out.append(Explicit(complete_from_theta(beta, d, n), ClassTag("lambda_n", n)))
    return out


def g_word(alpha: FenceMap, n: int) -> GeneratorWord:
    _require_valid(alpha, n)
    out: list[GeneratorSymbol] = []
    for f in h_word(alpha, n).factors:
        if isinstance(f, AlphaGen):
            out += _expand_alpha(f.k, n)
        elif isinstance(f, BetaGen):
            out += _expand_beta(f.k, n)
        elif isinstance(f, Explicit) and f.certified_class.name == "delta_n":
            out += _expand_delta_member(f.map, n)
        else:
            out.append(f)
    return GeneratorWord(tuple(out), TargetClass("g", n))


# --- K-split ---------------------------------------------------------------------------


def k_split(alpha: FenceMap) -> tuple[FenceMap, FenceMap]:
    """Split a map of finite least recurring run length into two maps with longer runs.

    The first factor is onto and collapses exactly the even-numbered
    collapsed blocks of ``alpha``; the second reads ``alpha`` off the
    least preimage.
    """
    if not is_fence_preserving(alpha):
        raise FactorizationError("input map is not fence-preserving")
    kc = k_class(alpha)
    if kc.kind != "K":
        raise FactorizationError(f"k_split needs a map with a finite run class, got {kc}")
    bs = block_stream(alpha)
    t0, p = _tail_shape(bs)
    per = sum(1 for _, length, _ in bs.tail.shapes if length >= 2)
    period = p if per % 2 == 0 else 2 * p
    star_index: dict[int, int] = {}
    count = 0
    for b in bs.upto(t0 + 8 * period + 2):
        if b.length >= 2:
            count += 1
            star_index[b.start] = count

    def collapse(i: int, b: Block) -> bool:
        return star_index.get(b.start, 1) % 2 == 0

    g1 = _relabel(alpha, 1, collapse, t0, period)
    g2 = _pullback(g1, alpha)
    return g1, g2


# --- verification ------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorCertification:
    index: int
    symbol: str
    ok: bool
    failing_predicate: str | None = None

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "symbol": self.symbol,
            "ok": self.ok,
            "failing_predicate": self.failing_predicate,
        }


@dataclass(frozen=True)
class VerificationReport:
    composed_equals_target: bool
    mismatch_witness: tuple[int, int, int] | None
    factor_certifications: tuple[FactorCertification, ...] = field(default=())

    @property
    def all_certified(self) -> bool:
        return all(c.ok for c in self.factor_certifications)

    @property
    def ok(self) -> bool:
        return self.composed_equals_target and self.all_certified

    def to_json(self) -> dict:
        w = self.mismatch_witness
        return {
            "schema_version": SCHEMA_VERSION,
            "ok": self.ok,
            "composed_equals_target": self.composed_equals_target,
            "mismatch_witness": None if w is None else {"x": w[0], "composed": w[1], "target": w[2]},
            "factor_certifications": [c.to_json() for c in self.factor_certifications],
        }


@lru_cache(maxsize=4096)
def _report(m: FenceMap, n: int):
    return classify(m, n)


def _certify(f: GeneratorSymbol, tc: TargetClass) -> str | None:
    """Name of the violated predicate, or None when the factor is allowed."""
    scheme, n = tc.scheme, tc.n or 1
    allowed = {
        "h": (Xi, AlphaGen, BetaGen, LambdaGen, Explicit),
        "g": (Xi, LambdaGen, Explicit),
        "delta": (Xi, BetaGen, LambdaGen, Explicit),
        "theta-lambda": (Explicit,),
        "ksplit": (Explicit,),
    }[scheme]
    if not isinstance(f, allowed):
        return f"kind_not_in_{scheme}"
    if isinstance(f, Xi):
        return None
    if isinstance(f, (AlphaGen, BetaGen)):
        return None if f.k >= n else "index_at_least_n"
    if isinstance(f, LambdaGen):
        if f.k % 2 == 0:
            return "odd_index"
        return None if _report(f.to_map(), n).in_lambda_n else "lambda_n"
    tag = f.certified_class
    tags_ok = {
        "h": ("lambda_n", "delta_n"),
        "g": ("lambda_n", "g3"),
        "delta": ("lambda_n",),
        "theta-lambda": ("theta", "lambda_n"),
        "ksplit": ("k_above",),
    }[scheme]
    if tag.name not in tags_ok:
        return f"tag_not_in_{scheme}"
    if tag.name != "k_above" and tag.name != "theta" and tag.n != n:
        return "tag_parameter"
    m = f.map
    if not is_fence_preserving(m):
        return "fence_preserving"
    if tag.name == "k_above":
        kc = k_class(m)
        if kc.kind == "K_inf" or (kc.kind == "K" and kc.l > (tag.n or 0)):
            return None
        return "k_above"
    rep = _report(m, n)
    ok = {
        "theta": rep.in_theta,
        "lambda_n": rep.in_lambda_n,
        "delta_n": rep.in_delta_n,
        "g3": "g3" in rep.g_reasons,
    }[tag.name]
    return None if ok else tag.name


def mismatch(a: FenceMap, b: FenceMap) -> tuple[int, int, int] | None:
    """First position where two maps differ (exhaustive: past this window they agree forever)."""
    if a == b:
        return None
    span = lcm(a.tail_period, b.tail_period)
    hi = max(a.tail_start, b.tail_start) + 2 * span
    for x in range(1, hi + 1):
        u, v = evaluate(a, x), evaluate(b, x)
        if u != v:
            return x, u, v
    raise AssertionError("distinct normal forms must differ in the window")  # pragma: no cover


def verify_word(word: GeneratorWord, target: FenceMap) -> VerificationReport:
    try:
        composed = word.compose()
    except MapError as exc:  # e.g. an even lambda index
        certs = tuple(
            FactorCertification(i, render_symbol(f), False, str(exc)) for i, f in enumerate(word.factors)
        )
        return VerificationReport(False, None, certs)
    w = mismatch(composed, target)
    certs = []
    for i, f in enumerate(word.factors):
        try:
            bad = _certify(f, word.target_class)
        except MapError as exc:
            bad = str(exc)
        certs.append(FactorCertification(i, render_symbol(f), bad is None, bad))
    return VerificationReport(w is None, w, tuple(certs))


def factor(alpha: FenceMap, scheme: str, n: int | None = None) -> GeneratorWord:
    """Dispatch by scheme name; the two-map schemes come back as two-factor words."""
    if scheme in SCHEMES and scheme != "ksplit":
        _require_valid(alpha, n)
        if n is None:
            raise FactorizationError(f"scheme {scheme!r} needs a class parameter n")
    if scheme == "theta-lambda":
        g1, g2 = theta_lambda_factor(alpha, n)
        return GeneratorWord(
            (Explicit(g1, ClassTag("theta")), Explicit(g2, ClassTag("lambda_n", n))),
            TargetClass(scheme, n),
        )
    if scheme == "h":
        return h_word(alpha, n)
    if scheme == "g":
        return g_word(alpha, n)
    if scheme == "ksplit":
        kc = k_class(alpha) if is_fence_preserving(alpha) else None
        g1, g2 = k_split(alpha)
        tag = ClassTag("k_above", kc.l)
        return GeneratorWord((Explicit(g1, tag), Explicit(g2, tag)), TargetClass(scheme, None))
    if scheme == "delta":
        m = delta_index(alpha)
        if m is None:
            raise FactorizationError("delta scheme needs a map of the form delta:m")
        return delta_word(m, n)
    raise FactorizationError(f"unknown scheme {scheme!r}")


def delta_index(alpha: FenceMap) -> int | None:
    from .generators import delta_gen

    first = next(iter(block_stream(alpha)))
    m = first.length
    if m is None:
        return None
    return m if alpha == delta_gen(m) else None
