"""Natural numbers extended by a single infinite cardinal (aleph-null)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Union


@total_ordering
@dataclass(frozen=True)
class ExtNat:
    """A non-negative integer, or countable infinity when ``value`` is None."""

    value: int | None = None

    def __post_init__(self) -> None:
        if self.value is not None and self.value < 0:
            raise ValueError(f"ExtNat must be non-negative, got {self.value}")

    @classmethod
    def of(cls, n: int) -> ExtNat:
        return cls(int(n))

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def _key(self) -> tuple[int, int]:
        return (1, 0) if self.value is None else (0, self.value)

    def __eq__(self, other: object) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.value == other.value

    def __hash__(self) -> int:
        return hash(("ExtNat", self.value))

    def __lt__(self, other: object) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._key() < other._key()

    def __add__(self, other: object) -> ExtNat:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.value is None or other.value is None:
            return ALEPH0
        return ExtNat(self.value + other.value)

    __radd__ = __add__

    def __int__(self) -> int:
        if self.value is None:
            raise OverflowError("aleph0 has no integer value")
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __str__(self) -> str:
        return "ℵ₀" if self.value is None else str(self.value)

    def __repr__(self) -> str:
        return "ALEPH0" if self.value is None else f"ExtNat({self.value})"

    def to_json(self) -> dict:
        if self.value is None:
            return {"kind": "aleph0"}
        return {"kind": "finite", "value": self.value}

    @classmethod
    def from_json(cls, data: dict) -> ExtNat:
        if data["kind"] == "aleph0":
            return ALEPH0
        if data["kind"] == "finite":
            return cls(int(data["value"]))
        raise ValueError(f"unknown cardinality tag {data['kind']!r}")


ALEPH0 = ExtNat(None)

ExtNatLike = Union[ExtNat, int]


def _coerce(x: object) -> ExtNat:
    if isinstance(x, ExtNat):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return ExtNat(x)
    return NotImplemented
