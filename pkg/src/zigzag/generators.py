"""Named transformation families and the symbols used to spell generator words."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .fencemap import FenceMap, MapError, normalize


class ParityError(MapError):
    """Raised when a family member is only fence-preserving for odd indices."""


def _need_positive(k: int, what: str) -> None:
    if not isinstance(k, int) or k < 1:
        raise MapError(f"{what} index must be a positive integer, got {k!r}")


@lru_cache(maxsize=None)
def xi() -> FenceMap:
    """x -> x + 2."""
    return FenceMap((), 1, 1, 1, (3,))


@lru_cache(maxsize=None)
def alpha_gen(k: int) -> FenceMap:
    """Identity below ``k``, constant ``k`` from ``k`` on."""
    _need_positive(k, "alpha")
    return normalize(FenceMap(tuple(range(1, k)), k, 1, 0, (k,)))


@lru_cache(maxsize=None)
def beta_gen(k: int) -> FenceMap:
    """Identity below ``k``, ``{k, k+1, k+2} -> k``, then ``x -> x - 2``."""
    _need_positive(k, "beta")
    return normalize(FenceMap(tuple(range(1, k)) + (k, k, k), k + 3, 1, 1, (k + 1,)))


@lru_cache(maxsize=None)
def lambda_gen(k: int) -> FenceMap:
    """Descending staircase ``k, k-1, ..., 1`` on ``[1, k]``, then ``x -> x - k + 1``."""
    _need_positive(k, "lambda")
    if k % 2 == 0:
        raise ParityError(f"lambda:{k} is not fence-preserving (index must be odd)")
    return normalize(FenceMap(tuple(range(k, 0, -1)), k + 1, 1, 1, (2,)))


def parity_anchor(k: int) -> int:
    return 1 if k % 2 else 2


@lru_cache(maxsize=None)
def delta_gen(k: int) -> FenceMap:
    """Constant anchor (1 for odd ``k``, 2 for even) on ``[1, k]``, slope one after."""
    _need_positive(k, "delta")
    c = parity_anchor(k)
    return normalize(FenceMap((c,) * k, k + 1, 1, 1, (c + 1,)))


@lru_cache(maxsize=None)
def collapse_witness() -> FenceMap:
    """``4n-3 -> 2n-1`` and ``{4n-2, 4n-1, 4n} -> 2n``."""
    return FenceMap((), 1, 4, 2, (1, 2, 2, 2))


@dataclass(frozen=True)
class PeriodicSubset:
    """Eventually periodic subset of the positive integers.

    ``x`` belongs to the set iff ``head[x-1]`` for ``x <= len(head)``, else
    ``pattern[(x - len(head) - 1) % len(pattern)]``.
    """

    head: tuple[bool, ...]
    pattern: tuple[bool, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "head", tuple(bool(b) for b in self.head))
        object.__setattr__(self, "pattern", tuple(bool(b) for b in self.pattern))
        if not self.pattern:
            raise MapError("subset pattern must be nonempty")

    def __contains__(self, x: int) -> bool:
        if x <= len(self.head):
            return self.head[x - 1]
        return self.pattern[(x - len(self.head) - 1) % len(self.pattern)]

    @classmethod
    def from_members(
        cls, members: tuple[int, ...] | list[int], period: int, pattern: tuple[bool, ...] | list[bool]
    ) -> PeriodicSubset:
        """Explicit members up to ``max(members)``, then ``pattern`` repeating."""
        if any(m < 1 for m in members):
            raise MapError("subset members must be positive")
        if period != len(pattern):
            raise MapError(f"pattern has {len(pattern)} entries but period={period}")
        h = max(members, default=0)
        return cls(tuple(x in members for x in range(1, h + 1)), tuple(pattern))

    @classmethod
    def everything(cls) -> PeriodicSubset:
        return cls((), (True,))

    @classmethod
    def empty(cls) -> PeriodicSubset:
        return cls((), (False,))

    @classmethod
    def evens(cls) -> PeriodicSubset:
        return cls((), (False, True))

    @classmethod
    def odds(cls) -> PeriodicSubset:
        return cls((), (True, False))


def alpha_family(a: PeriodicSubset) -> FenceMap:
    """Onto, convex-fibered map whose fiber over ``v`` has 3 points if ``v`` is in ``a``, else 5."""
    values: list[int] = []
    head_len = len(a.head)
    for v in range(1, head_len + 1):
        values += [v] * (3 if v in a else 5)
    start = len(values) + 1
    lengths = [3 if b else 5 for b in a.pattern]
    period = sum(lengths)
    for v, length in enumerate(lengths, head_len + 1):
        values += [v] * length
    prefix = tuple(values[: start - 1])
    base = tuple(values[start - 1 :])
    return normalize(FenceMap(prefix, start, period, len(lengths), base))


# --- generator symbols --------------------------------------------------------


@dataclass(frozen=True)
class Xi:
    def to_map(self) -> FenceMap:
        return xi()


@dataclass(frozen=True)
class AlphaGen:
    k: int

    def to_map(self) -> FenceMap:
        return alpha_gen(self.k)


@dataclass(frozen=True)
class BetaGen:
    k: int

    def to_map(self) -> FenceMap:
        return beta_gen(self.k)


@dataclass(frozen=True)
class LambdaGen:
    k: int

    def to_map(self) -> FenceMap:
        return lambda_gen(self.k)


@dataclass(frozen=True)
class DeltaGen:
    k: int

    def to_map(self) -> FenceMap:
        return delta_gen(self.k)


@dataclass(frozen=True)
class ClassTag:
    """A class claim attached to an explicit factor.

    ``name`` is one of theta, lambda_n, delta_n, g3, k_above; ``n`` is the
    class parameter (for k_above it is the run length to exceed).
    """

    name: str
    n: int | None = None

    NAMES = ("theta", "lambda_n", "delta_n", "g3", "k_above")

    def __post_init__(self) -> None:
        if self.name not in self.NAMES:
            raise ValueError(f"unknown class tag {self.name!r}")

    def to_json(self) -> dict:
        return {"name": self.name, "n": self.n}

    @classmethod
    def from_json(cls, data: dict) -> ClassTag:
        return cls(data["name"], data.get("n"))


@dataclass(frozen=True)
class Explicit:
    map: FenceMap
    certified_class: ClassTag

    def to_map(self) -> FenceMap:
        return self.map


GeneratorSymbol = Union[Xi, AlphaGen, BetaGen, LambdaGen, DeltaGen, Explicit]
