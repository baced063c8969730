"""Exact computation in the semigroup of zig-zag-order-preserving self-maps of the positive integers."""

from __future__ import annotations

from .extnat import ALEPH0, ExtNat
from .fencemap import (
    IDENTITY,
    FenceMap,
    MapError,
    compose,
    compose_all,
    equals,
    evaluate,
    is_fence_preserving,
    normalize,
    power,
)

__all__ = [
    "ALEPH0",
    "ExtNat",
    "IDENTITY",
    "FenceMap",
    "MapError",
    "compose",
    "compose_all",
    "equals",
    "evaluate",
    "is_fence_preserving",
    "normalize",
    "power",
]
