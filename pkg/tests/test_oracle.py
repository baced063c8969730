from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mapgen import random_fence_map
from zigzag.fencemap import IDENTITY, FenceMap, compose, evaluate, normalize
from zigzag.generators import alpha_gen, beta_gen, collapse_witness, delta_gen, lambda_gen, xi
from zigzag.invariants import fiber_positions
from zigzag.oracle import (
    DEFAULT_HORIZON,
    MAX_HORIZON,
    PrefixTable,
    agree_on_prefix,
    auto_horizon,
    brute_blocks,
    brute_preserving,
    brute_singleton_runs,
    fiber,
    first_disagreement,
    precedes_or_equal,
)

fence_maps = st.integers(0, 2**32).map(lambda s: random_fence_map(random.Random(s)))


def test_order():
    assert precedes_or_equal(1, 2) and precedes_or_equal(3, 2) and precedes_or_equal(4, 4)
    assert not precedes_or_equal(2, 1) and not precedes_or_equal(1, 3)


class TestBrutePreserving:
    def test_xi(self):
        assert brute_preserving(xi(), 100)

    def test_shift_by_one(self):
        assert not brute_preserving(FenceMap((), 1, 1, 1, (2,)), 100)

    def test_lambda_three(self):
        assert brute_preserving(lambda_gen(3), 100)

    def test_small_horizon(self):
        with pytest.raises(ValueError):
            brute_preserving(xi(), 2)


class TestBlocks:
    def test_witness(self):
        got = [list(b.positions) for b in brute_blocks(collapse_witness(), 12)]
        assert got == [[1], [2, 3, 4], [5], [6, 7, 8], [9], [10, 11, 12]]
        assert brute_blocks(collapse_witness(), 12)[-1].truncated

    def test_xi(self):
        assert [b.length for b in brute_blocks(xi(), 5)] == [1] * 5

    def test_alpha_truncated(self):
        last = brute_blocks(alpha_gen(3), 10)[-1]
        assert (last.start, last.length, last.truncated) == (3, 8, True)

    def test_singleton_runs(self):
        runs = brute_singleton_runs(beta_gen(4), 20)
        assert (runs[0].start, runs[0].length) == (1, 3)
        assert runs[1].start == 7 and runs[1].truncated


class TestFiber:
    def test_beta(self):
        f = fiber(beta_gen(4), 4, 100)
        assert f.positions == {4, 5, 6} and f.complete

    def test_below_image(self):
        f = fiber(xi(), 2, 100)
        assert f.positions == frozenset() and f.complete

    def test_lambda_factor(self):
        f = fiber(FenceMap((5, 4), 3, 1, 1, (3,)), 4, 100)
        assert f.positions == {2, 4} and f.complete

    def test_bounded_map_never_complete(self):
        assert not fiber(alpha_gen(3), 3, 50).complete

    @given(fence_maps, st.integers(1, 30))
    @settings(max_examples=150)
    def test_complete_is_stable(self, m, v):
        f = fiber(m, v, 150)
        if f.complete:
            assert fiber(m, v, 300).positions == f.positions
            assert tuple(sorted(f.positions)) == fiber_positions(m, v)


class TestAgreement:
    def test_delta_one(self):
        assert agree_on_prefix(delta_gen(1), compose(xi(), beta_gen(1)), 200)

    def test_disagree(self):
        assert not agree_on_prefix(xi(), IDENTITY, 1)
        assert first_disagreement(xi(), IDENTITY, 10) == 1
        assert first_disagreement(xi(), xi(), 10) is None

    def test_normalized_unfolding(self):
        unfolded = FenceMap((3, 4), 3, 3, 3, (5, 6, 7))
        assert agree_on_prefix(normalize(unfolded), xi(), 500)


class TestHorizon:
    def test_default(self):
        assert auto_horizon(xi()) == DEFAULT_HORIZON

    def test_doubles(self):
        m = FenceMap(tuple([1] * 299), 300, 1, 0, (1,))
        assert auto_horizon(m) == 400

    def test_capped(self):
        m = FenceMap((), 1, 1, 0, (1,))
        assert auto_horizon(m, base=MAX_HORIZON) == MAX_HORIZON

    def test_prefix_table(self):
        t = PrefixTable.of(collapse_witness(), 8)
        assert t.values == (1, 2, 2, 2, 3, 4, 4, 4) and t[6] == evaluate(collapse_witness(), 6)
