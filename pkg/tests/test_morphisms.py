import random
from itertools import product

import pytest

from higman.complex import build_ball
from higman.morphisms import (
    HOM,
    NOT_HOM,
    TRIVIAL_HOM,
    allowed_shifts,
    automorphism_decompose,
    compose,
    conjugator_words,
    exponent_probe,
    hom_check,
    identity_candidate,
    inner_candidate,
    m_adic_valuation,
    probe_grid,
    shift_candidate,
    special_image_check,
    substitute,
)
from higman.sampling import random_reduced_word
from higman.words import HigmanGroup, parse_word as W, word_mul


@pytest.fixture(scope="module")
def H():
    return HigmanGroup((2, 2, 2, 2))


@pytest.fixture(scope="module")
def H2357():
    return HigmanGroup((2, 3, 5, 7))


def test_hom_check_examples(H, H2357):
    assert hom_check(H, identity_candidate()).status == HOM
    assert hom_check(H, shift_candidate(1)).status == HOM
    res = hom_check(H2357, shift_candidate(1))
    assert res.status == NOT_HOM and res.relator == 0
    assert hom_check(H, ((), (), (), ())).status == TRIVIAL_HOM


def test_shifts(H, H2357):
    assert [hom_check(H, shift_candidate(k)).status for k in range(4)] == [HOM] * 4
    assert [hom_check(H2357, shift_candidate(k)).status == HOM for k in range(4)] == [True, False, False, False]
    assert allowed_shifts(H) == [0, 1, 2, 3] and allowed_shifts(H2357) == [0]


def test_exponent_probe_examples(H):
    assert exponent_probe(H, (1, 1, 1, 1)).status == HOM
    r = exponent_probe(H, (2, 1, 1, 1))
    assert r.status == NOT_HOM
    # relator 0 collapses to a1^(m0^2 - m0)
    assert r.cases[0]["britton_normal_form"] == [["b", 2]]
    assert H.equal(substitute(W("a0 a1 a0^-1 a1^-2"), ((((0, 2),)), ((1, 1),), ((2, 1),), ((3, 1),))), W("a1^2"))
    r = exponent_probe(H, (-1, 1, 1, 1))
    assert r.status == NOT_HOM and r.cases[0]["case"] == "k<-n"
    r = exponent_probe(H, (-1, 2, 1, 1))
    assert r.cases[0]["case"] == "k>=-n" and r.cases[0]["britton_normal_form"] == [["b", -3]]
    with pytest.raises(ValueError):
        exponent_probe(H, (0, 1, 1, 1))


def test_valuation():
    assert m_adic_valuation(2, 12) == 2 and m_adic_valuation(3, 5) == 0


@pytest.mark.parametrize("m", [(2, 2, 2, 2), (2, 3, 5, 7)])
def test_probe_grid_small(m):
    G = HigmanGroup(m)
    homs = [r.exponents for r in probe_grid(G, 2)]
    assert [r.exponents for r in probe_grid(G, 2) if r.status == HOM] == [(1, 1, 1, 1)]
    assert len(homs) == 4**4


def test_composition_of_homs(H):
    rng = random.Random(4)
    for _ in range(10):
        f = inner_candidate(random_reduced_word(rng, 2), rng.randrange(4))
        g = inner_candidate(random_reduced_word(rng, 2), rng.randrange(4))
        assert hom_check(H, compose(f, g)).status == HOM


def test_no_partially_trivial_homs(H):
    # images drawn from {1, a_j}: a Hom never kills some generators but not others
    choices = [()] + [((j, 1),) for j in range(4)]
    for c in product(choices, repeat=4):
        status = hom_check(H, c).status
        if status == HOM:
            assert all(w != () for w in c)


def test_special_images(H):
    ball = build_ball(H, 1, 1)
    ident = special_image_check(H, identity_candidate(), ball)
    assert [(s.corner, s.square) for s in ident] == [(i, ()) for i in range(4)]
    shifted = special_image_check(H, shift_candidate(1), ball)
    assert [s.corner for s in shifted] == [1, 2, 3, 0]
    inner = special_image_check(H, inner_candidate(W("a0")), ball)
    for i, s in enumerate(inner):
        assert s.corner == i and H.vertex_membership(word_mul(W("a0^-1"), s.square), i)


def test_decompose_examples(H):
    assert automorphism_decompose(H, inner_candidate(W("a0"))) == (0, W("a0"))
    assert automorphism_decompose(H, shift_candidate(1)) == (1, ())
    k, g = automorphism_decompose(H, compose(inner_candidate(W("a2")), shift_candidate(1)))
    assert k == 1 and H.equal(g, W("a2"))
    with pytest.raises(ValueError):
        automorphism_decompose(H, ((), (), (), ()))


def test_decompose_random(H):
    rng = random.Random(9)
    for _ in range(10):
        g = random_reduced_word(rng, rng.randint(0, 2))
        k = rng.randrange(4)
        k2, g2 = automorphism_decompose(H, inner_candidate(g, k))
        assert k2 == k and H.equal(g2, g)


def test_conjugator_enumeration():
    words = list(conjugator_words(2))
    assert words[0] == () and len(words) == 1 + 8 + 56
