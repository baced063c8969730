from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mapgen import k_member, random_fence_map, shifted_witness
from zigzag.fencemap import FenceMap, compose, compose_all, evaluate
from zigzag.factorization import (
    SCHEMES,
    AlphaGen,
    BetaGen,
    ClassTag,
    Explicit,
    FactorizationError,
    GeneratorWord,
    LambdaGen,
    TargetClass,
    Xi,
    block_index_map,
    complete_from_theta,
    delta_index,
    delta_word,
    factor,
    g_word,
    h_word,
    k_split,
    mismatch,
    non_delta_word,
    theta_lambda_factor,
    verify_word,
)
from zigzag.generators import alpha_gen, beta_gen, collapse_witness, delta_gen, lambda_gen, xi
from zigzag.invariants import classify, k_class, same_blocks
from zigzag.oracle import agree_on_prefix

fence_maps = st.integers(0, 2**32).map(lambda s: random_fence_map(random.Random(s)))
levels = st.integers(1, 8)

LAMBDA_FACTOR = FenceMap((5, 4), 3, 1, 1, (3,))
# 1,1,1,2,3,3,3,4,...: infinitely many triples, the first one covering 1 and 2
EARLY_COLLAPSE = FenceMap((), 1, 4, 2, (1, 1, 1, 2))


class TestThetaLambda:
    def test_xi(self):
        g1, g2 = theta_lambda_factor(xi(), 1)
        assert g1 == xi()
        assert g2 == LAMBDA_FACTOR
        assert agree_on_prefix(compose(g1, g2), xi(), 200)

    def test_alpha_two(self):
        g1, g2 = theta_lambda_factor(alpha_gen(2), 1)
        assert g1.values(1, 5) == [3, 4, 4, 4, 4]
        assert compose(g1, g2) == alpha_gen(2)

    def test_witness_level_two(self):
        g1, g2 = theta_lambda_factor(collapse_witness(), 2)
        assert classify(g1).in_theta and same_blocks(g1, collapse_witness()) and evaluate(g1, 1) >= 2
        assert classify(g2, 2).in_lambda_n
        assert compose(g1, g2) == collapse_witness()

    def test_first_factor_is_block_index(self):
        assert block_index_map(collapse_witness(), 3).values(1, 8) == [3, 4, 4, 4, 5, 6, 6, 6]

    @given(fence_maps, levels)
    @settings(max_examples=100)
    def test_random(self, m, n):
        g1, g2 = theta_lambda_factor(m, n)
        assert classify(g1, n).in_theta and classify(g2, n).in_lambda_n
        assert compose(g1, g2) == m


class TestCompletion:
    def test_xi(self):
        assert complete_from_theta(xi(), xi(), 1) == LAMBDA_FACTOR

    def test_witness(self):
        g1, g2 = theta_lambda_factor(collapse_witness(), 2)
        assert complete_from_theta(g1, collapse_witness(), 2) == g2

    def test_block_mismatch(self):
        with pytest.raises(FactorizationError, match="blocks"):
            complete_from_theta(xi(), collapse_witness(), 1)

    def test_image_too_low(self):
        with pytest.raises(FactorizationError):
            complete_from_theta(xi(), xi(), 5)

    def test_non_convex_first_factor(self):
        with pytest.raises(FactorizationError, match="convex"):
            complete_from_theta(LAMBDA_FACTOR, LAMBDA_FACTOR, 1)

    def test_not_preserving(self):
        with pytest.raises(FactorizationError):
            complete_from_theta(FenceMap((), 1, 1, 1, (2,)), xi(), 1)


class TestDeltaWord:
    def test_one_one(self):
        assert delta_word(1, 1).factors == (Xi(), BetaGen(1))

    def test_two_one(self):
        assert delta_word(2, 1).factors == (Xi(), Xi(), BetaGen(4), LambdaGen(3))

    def test_three_two(self):
        assert delta_word(3, 2).factors == (Xi(), Xi(), Xi(), BetaGen(7), LambdaGen(7))

    @pytest.mark.parametrize("m", range(1, 9))
    @pytest.mark.parametrize("n", range(1, 9))
    def test_table(self, m, n):
        assert verify_word(delta_word(m, n), delta_gen(m)).ok

    def test_rejects_zero(self):
        with pytest.raises(FactorizationError):
            delta_word(0, 1)

    def test_delta_index(self):
        assert delta_index(delta_gen(5)) == 5
        assert delta_index(xi()) == 1 or delta_index(xi()) is None
        assert delta_index(alpha_gen(3)) is None


class TestNonDelta:
    def test_xi(self):
        w = non_delta_word(xi(), 1)
        assert w.factors[0] == Xi() and len(w) == 2
        assert w.factors[1].certified_class == ClassTag("lambda_n", 1)
        assert verify_word(w, xi()).ok

    def test_alpha_four(self):
        w = non_delta_word(alpha_gen(4), 2)
        assert AlphaGen(6) in w.factors
        assert verify_word(w, alpha_gen(4)).ok

    def test_beta_five(self):
        w = non_delta_word(beta_gen(5), 3)
        assert w.compose() == beta_gen(5)
        assert verify_word(w, beta_gen(5)).ok

    @pytest.mark.parametrize("value", [1, 2, 5, 6, 9])
    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_constant_maps(self, value, n):
        m = FenceMap((), 1, 1, 0, (value,))
        assert verify_word(non_delta_word(m, n), m).ok

    def test_infinite_collapse_rejected(self):
        with pytest.raises(FactorizationError):
            non_delta_word(collapse_witness(), 1)


class TestHWord:
    def test_named(self):
        assert h_word(alpha_gen(5), 3).factors == (AlphaGen(5),)
        assert h_word(beta_gen(4), 2).factors == (BetaGen(4),)

    def test_witness_separated(self):
        w = h_word(collapse_witness(), 1)
        assert [f.certified_class.name for f in w.factors] == ["delta_n", "lambda_n"]
        assert verify_word(w, collapse_witness()).ok

    def test_early_collapse(self):
        w = h_word(EARLY_COLLAPSE, 2)
        assert w.factors[0].certified_class == ClassTag("delta_n", 2)
        assert verify_word(w, EARLY_COLLAPSE).ok

    def test_witness_collapsed(self):
        w = h_word(collapse_witness(), 3)
        assert BetaGen(6) in w.factors
        assert verify_word(w, collapse_witness()).ok

    @pytest.mark.parametrize("j", range(5))
    @pytest.mark.parametrize("n", range(1, 9))
    def test_shifted_witnesses(self, j, n):
        m = shifted_witness(j)
        assert verify_word(h_word(m, n), m).ok

    @given(fence_maps, levels)
    @settings(max_examples=80)
    def test_random(self, m, n):
        assert verify_word(h_word(m, n), m).ok


class TestGWord:
    def test_beta_four(self):
        w = g_word(beta_gen(4), 2)
        first, last = w.factors
        assert first.certified_class.name == "g3"
        assert first.map.values(1, 60) == [evaluate(beta_gen(4), x) + 6 for x in range(1, 61)]
        assert last == LambdaGen(7)

    def test_alpha_four(self):
        w = g_word(alpha_gen(4), 3)
        assert [f.certified_class.name for f in w.factors[:2]] == ["lambda_n", "g3"]
        assert w.factors[2] == LambdaGen(13)
        assert verify_word(w, alpha_gen(4)).ok

    def test_xi(self):
        assert g_word(xi(), 5).factors == (Xi(),)

    def test_witness(self):
        assert verify_word(g_word(collapse_witness(), 1), collapse_witness()).ok

    def test_only_chain_generators(self):
        for f in g_word(alpha_gen(3), 2).factors:
            assert isinstance(f, (Xi, LambdaGen, Explicit))

    @given(fence_maps, levels)
    @settings(max_examples=80)
    def test_random(self, m, n):
        assert verify_word(g_word(m, n), m).ok


class TestKSplit:
    def test_witness(self):
        g1, g2 = k_split(collapse_witness())
        assert compose(g1, g2) == collapse_witness()
        assert k_class(g1).l == 5 and k_class(g2).l == 3

    def test_k_two(self):
        m = FenceMap((), 1, 5, 3, (1, 2, 3, 3, 3))
        g1, g2 = k_split(m)
        assert compose(g1, g2) == m
        for g in (g1, g2):
            kc = k_class(g)
            assert kc.kind == "K_inf" or kc.l > 2

    def test_outside_p(self):
        with pytest.raises(FactorizationError):
            k_split(xi())

    @pytest.mark.parametrize("l", [1, 2, 3, 4])
    def test_members(self, l):
        rng = random.Random(100 + l)
        for _ in range(8):
            m = k_member(rng, l)
            w = factor(m, "ksplit")
            assert verify_word(w, m).ok


class TestVerify:
    def test_delta_two(self):
        rep = verify_word(delta_word(2, 1), delta_gen(2))
        assert rep.composed_equals_target and rep.ok

    def test_mismatch_reported(self):
        rep = verify_word(GeneratorWord((Xi(),), TargetClass("h", 1)), delta_gen(1))
        assert not rep.composed_equals_target
        assert rep.mismatch_witness == (1, 3, 1)

    def test_g_word_certified(self):
        rep = verify_word(g_word(beta_gen(4), 2), beta_gen(4))
        assert rep.ok and all(c.ok for c in rep.factor_certifications)

    def test_bad_factor_reported(self):
        word = GeneratorWord((AlphaGen(2),), TargetClass("g", 3))
        rep = verify_word(word, alpha_gen(2))
        assert rep.composed_equals_target and not rep.ok
        assert rep.factor_certifications[0].failing_predicate == "kind_not_in_g"

    def test_low_index_reported(self):
        rep = verify_word(GeneratorWord((AlphaGen(2),), TargetClass("h", 3)), alpha_gen(2))
        assert rep.factor_certifications[0].failing_predicate == "index_at_least_n"

    def test_false_tag_reported(self):
        word = GeneratorWord((Explicit(xi(), ClassTag("lambda_n", 1)),), TargetClass("h", 1))
        rep = verify_word(word, xi())
        assert rep.factor_certifications[0].failing_predicate == "lambda_n"

    def test_mismatch_helper(self):
        assert mismatch(xi(), xi()) is None
        assert mismatch(alpha_gen(3), alpha_gen(4))[0] == 4


class TestWordJson:
    @pytest.mark.parametrize(
        "word",
        [delta_word(3, 2), g_word(alpha_gen(4), 3), h_word(collapse_witness(), 3), factor(collapse_witness(), "ksplit")],
    )
    def test_round_trip(self, word):
        data = json.loads(json.dumps(word.to_json()))
        assert data["schema_version"] == 1
        back = GeneratorWord.from_json(data)
        assert back == word and back.compose() == word.compose()

    def test_render(self):
        assert delta_word(2, 1).render() == "ξ·ξ·β₄·λ₃"
        assert g_word(beta_gen(4), 2).render().endswith("λ₇")


class TestDispatch:
    @pytest.mark.parametrize("scheme", [s for s in SCHEMES if s not in ("delta", "ksplit")])
    def test_schemes_verify(self, scheme):
        m = collapse_witness()
        assert verify_word(factor(m, scheme, 2), m).ok

    def test_delta_scheme_detects_index(self):
        w = factor(delta_gen(3), "delta", 2)
        assert w.factors == delta_word(3, 2).factors

    def test_delta_scheme_rejects_other_maps(self):
        with pytest.raises(FactorizationError):
            factor(xi(), "delta", 1)

    def test_missing_level(self):
        with pytest.raises(FactorizationError):
            factor(xi(), "h")

    def test_unknown_scheme(self):
        with pytest.raises(FactorizationError):
            factor(xi(), "nope", 1)

    def test_bad_level(self):
        with pytest.raises(FactorizationError):
            factor(xi(), "h", 0)

    def test_not_preserving(self):
        with pytest.raises(FactorizationError):
            factor(FenceMap((), 1, 1, 1, (2,)), "g", 1)


def test_words_compose_in_order():
    w = delta_word(2, 1)
    assert w.compose() == compose_all(f.to_map() for f in w.factors) == delta_gen(2)
    assert lambda_gen(3) == LambdaGen(3).to_map()
