import random

import pytest

from higman.bs import bs_eval, BSElem
from higman.sampling import (
    random_alternating_word,
    random_reduced_word,
    random_relator_product,
    random_word,
    word_length,
)
from higman.words import (
    HigmanGroup,
    HigmanParams,
    abelianization_class,
    format_word,
    parse_word,
    reduce_free,
    relators,
    word_inverse,
    word_mul,
)

W = parse_word


@pytest.fixture(scope="module")
def H():
    return HigmanGroup((2, 2, 2, 2))


@pytest.fixture(scope="module")
def H2357():
    return HigmanGroup((2, 3, 5, 7))


def test_params_validation():
    with pytest.raises(ValueError):
        HigmanParams((2, 1, 2, 2))
    with pytest.raises(ValueError):
        HigmanParams((2, 2, 2))


def test_parse_and_format():
    w = W("a0 a1 a0^-1 a1^-2")
    assert w == ((0, 1), (1, 1), (0, -1), (1, -2))
    assert format_word(w) == "a0 a1 a0^-1 a1^-2"
    assert W("") == ()
    with pytest.raises(ValueError, match="position 3"):
        W("a0 b1")
    with pytest.raises(ValueError, match="position 0"):
        W("a4")
    with pytest.raises(ValueError):
        W("a0^")


def test_reduce_free_examples():
    assert reduce_free([(0, 1), (0, -1)]) == ()
    assert reduce_free([(0, 2), (0, 3)]) == ((0, 5),)
    assert reduce_free([(0, 1), (1, 1), (1, -1), (2, 1)]) == ((0, 1), (2, 1))


def test_ga_reduce_examples(H):
    assert H.ga_reduce(W("a0 a1 a0^-1 a1^-2")).is_identity()
    g = H.ga_reduce(W("a0 a2"))
    assert [f for f, _ in g.syllables] == [0, 1]
    assert g.syllables[0][1] == BSElem.make(2, 0, 1)
    assert g.syllables[1][1] == BSElem.make(2, 1, 0)
    g = H.ga_reduce(W("a0 a1 a0^-1"))
    assert len(g) == 1 and g.syllables[0] == (0, BSElem.make(2, 2, 0))


def test_f_membership_examples(H):
    assert H.f_membership(H.ga_reduce(W("a0^2"))) == ((0, 2),)
    g = H.ga_reduce(W("a1^-1 a0 a1"))
    assert g.syllables == ((0, BSElem.make(2, 1, 1)),)
    assert H.f_membership(g) is None
    assert H.f_membership(H.ga_reduce(W("a0 a1 a0^-1"))) is None


def test_h_reduce_examples(H):
    assert H.reduce(W("a2 a3 a2^-1 a3^-2")).is_identity()
    red = H.reduce(W("a1 a3"))
    assert red.shape == ("a", "b")
    red = H.reduce(W("a0 a2 a0^-1 a2^-1"))
    assert red.blocks == () and red.fword == W("a0 a2 a0^-1 a2^-1")


def test_h_reduce_is_deterministic(H):
    w = W("a1 a0 a3 a2^-1 a1^2 a0 a3^-1")
    assert H.reduce(w) == H._reduce(w)


@pytest.mark.parametrize("m", [(2, 2, 2, 2), (2, 3, 5, 7), (3, 4, 2, 5)])
def test_relators_trivial(m):
    G = HigmanGroup(m)
    for r in relators(G.params):
        assert G.is_trivial(r)
        assert G.is_trivial(word_mul(W("a1 a3^2 a0"), r, word_inverse(W("a1 a3^2 a0"))))


def test_commutator_nontrivial(H):
    assert not H.is_trivial(W("a0 a2 a0^-1 a2^-1"))


def test_equal_mul_inv(H):
    assert H.equal(W("a1 a2 a1^-1"), W("a2^2"))
    w = W("a3 a1 a0^4")
    assert H.equal(w, w)
    assert H.mul(W("a0"), W("a0^-1")).is_identity()
    assert H.conj(W("a1"), W("a0")).blocks == H.reduce(W("a0 a1 a0^-1")).blocks


def test_vertex_membership_examples(H):
    assert H.vertex_membership(W("a0 a1 a0^-1"), 0)
    assert not H.vertex_membership(W("a2"), 0)
    assert H.vertex_membership(W("a0"), 3)
    assert H.vertex_coords(W("a0"), 3) == BSElem.make(2, 1, 0)
    assert H.vertex_coords(W("a3^2 a0"), 3) == BSElem.make(2, 4, 2)


def test_edge_membership_examples(H):
    assert H.edge_membership(W("a1 a2 a1^-1 a2^-2 a3^5"), 3) == 5
    for i in range(4):
        assert H.edge_membership((), i) == 0
    assert H.edge_membership(W("a0 a2"), 0) is None
    # a1 sits in two vertex groups; both routes agree
    assert H.edge_membership(W("a1^3"), 1) == 3
    assert H.edge_membership(W("a0 a1^2 a0^-1"), 1) == 4


def test_abelianization_examples():
    p = HigmanParams((2, 2, 2, 2))
    for r in relators(p):
        assert abelianization_class(p, r) == (0, 0, 0, 0)
    assert abelianization_class(p, W("a0 a1^5 a3")) == (0, 0, 0, 0)
    q = HigmanParams((2, 3, 5, 7))
    for r in relators(q):
        assert abelianization_class(q, r) == (0, 0, 0, 0)
    # a1 lives modulo m0 - 1 = 1, a2 modulo m1 - 1 = 2, a3 modulo 4, a0 modulo 6
    assert abelianization_class(q, W("a1")) == (0, 0, 0, 0)
    assert abelianization_class(q, W("a2 a3 a0")) == (1, 0, 1, 1)


def test_soundness_fuzz(H2357):
    rng = random.Random(11)
    for _ in range(150):
        w = random_relator_product(rng, H2357.params, rng.randint(1, 10), 6)
        assert H2357.is_trivial(w)


def test_f_words_nontrivial(H):
    rng = random.Random(12)
    for _ in range(300):
        w = random_reduced_word(rng, rng.randint(1, 20), gens=(0, 2))
        assert not H.is_trivial(w)


def test_alternating_words_nontrivial(H2357):
    rng = random.Random(13)
    for _ in range(200):
        w = random_alternating_word(rng, rng.randint(2, 5))
        assert not H2357.is_trivial(w)


@pytest.mark.parametrize("side", ["a", "b"])
def test_f_round_trip(H2357, side):
    rng = random.Random(14)
    tri = H2357.tri[side]
    for _ in range(200):
        w = random_reduced_word(rng, rng.randint(0, 15), gens=(0, 2))
        assert tri.f_word(tri.reduce(w).syllables) == w


def test_group_axioms_under_equal(H):
    rng = random.Random(15)
    for _ in range(60):
        x, y, z = (random_word(rng, rng.randint(0, 6)) for _ in range(3))
        assert H.equal(word_mul(word_mul(x, y), z), word_mul(x, word_mul(y, z)))
        assert H.mul(x, word_inverse(x)).is_identity()
        if H.equal(x, y) and H.equal(y, z):
            assert H.equal(x, z)
        assert H.equal(x, y) == H.equal(y, x)


@pytest.mark.parametrize("i", range(4))
def test_vertex_group_agrees_with_bs(H2357, i):
    rng = random.Random(16 + i)
    m = H2357.params[i]
    for _ in range(150):
        w = random_word(rng, rng.randint(0, 12), gens=(i, (i + 1) % 4), bound=2)
        bs_w = [("a" if g == i else "b", e) for g, e in w]
        assert H2357.is_trivial(w) == bs_eval(m, bs_w).is_identity()
        assert H2357.vertex_coords(w, i) == bs_eval(m, bs_w)


def test_triangle_canonical_key_is_invariant(H2357):
    rng = random.Random(17)
    tri = H2357.tri["a"]
    rels = [r for r in relators(H2357.params)[:2]]
    for _ in range(200):
        w = random_word(rng, rng.randint(0, 8), gens=(0, 1, 2), bound=2)
        r = rels[rng.randrange(2)]
        pos = rng.randint(0, len(w))
        w2 = word_mul(w[:pos], r, w[pos:])
        assert tri.canonical_key(tri.reduce(w)) == tri.canonical_key(tri.reduce(w2))


def test_shape_key_exact_for_single_blocks(H):
    k1, exact = H.shape_key(W("a1 a2 a1^-1"))
    k2, _ = H.shape_key(W("a2^2"))
    assert exact and k1 == k2
    _, exact = H.shape_key(W("a1 a3"))
    assert not exact


def test_word_length_helper():
    assert word_length(W("a0^-3 a1 a2^2")) == 6
