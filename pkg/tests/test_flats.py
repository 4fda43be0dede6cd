import pytest

from higman.bs import bs_eval
from higman.flats import (
    FlatSpec,
    FlatTooLarge,
    build_boundary,
    check_block,
    diagonal_words,
    extension_step,
    glue,
    grid_types,
    label_growth,
    quadrant_agreement,
    strictly_increasing,
    verify_local_isometry,
)
from higman.towers import Huge
from higman.words import HigmanGroup, parse_word as W, word_mul


@pytest.fixture(scope="module")
def H():
    return HigmanGroup((2, 2, 2, 2))


@pytest.fixture(scope="module")
def ones6(H):
    return glue(H, FlatSpec.constant(6))


def test_spec_validation():
    with pytest.raises(ValueError):
        FlatSpec(0, ((1,), (1,), (1,), ()), 1)
    with pytest.raises(ValueError):
        FlatSpec(0, ((1,), (0,), (1,), (1,)), 1)


def test_boundary_examples(H):
    q = build_boundary(0, [1, 1], [1, 1], 2)
    assert q.cells[(0, 0)] == ()
    assert q.cells[(1, 0)] == W("a0^-1")
    assert q.cells[(2, 0)] == W("a0^-1 a2^-1")
    assert q.cells[(0, 1)] == W("a1^-1")


def test_extension_example(H):
    letters, to_right, to_up = extension_step(H.params.m, (0, -1), (1, -1))
    c = word_mul(*[((g, n),) for g, n in letters])
    assert H.equal(c, W("a1^-1 a0^-1"))
    assert to_right == (1, 2)  # label a1^2 from C11 back to C10
    assert to_up == (0, 1)
    with pytest.raises(AssertionError):
        extension_step(H.params.m, (0, 1), (1, -1))


def test_extension_solves_grid_law_by_brute_force():
    # the fourth square is the unique completion among small exponents
    for p in (-1, -2):
        for q in (-1, -3):
            letters, _, _ = extension_step((2, 2, 2, 2), (0, p), (1, q))
            (_, e1), (_, e2) = letters
            hits = [
                r for r in range(-40, 41)
                if bs_eval(2, [("a", p), ("b", r)]) == bs_eval(2, [("b", q), ("a", p)])
            ]
            assert hits == [e2]


def test_fill_orders_agree(H):
    p = glue(H, FlatSpec.constant(2))
    for (x, y), w in p.cells.items():
        if x > 0 and y > 0 and w is not None:
            from_left = word_mul(p.cells[(x - 1, y)], (p.labels[((x - 1, y), (x, y))],))
            from_below = word_mul(p.cells[(x, y - 1)], (p.labels[((x, y - 1), (x, y))],))
            assert H.equal(from_left, w) and H.equal(from_below, w)


def test_positive_labels_towards_origin(ones6):
    from higman.towers import sign

    for ((x1, y1), (x2, y2)), (_, n) in ones6.labels.items():
        if x1 > 0 and y1 > 0 and (abs(x2) + abs(y2)) < (abs(x1) + abs(y1)):
            assert sign(n) > 0


def test_glue_trivial(H):
    p = glue(H, FlatSpec.constant(0))
    assert p.cells == {(0, 0): ()}
    assert label_growth(p) == {0: 0}


def test_line_types(ones6):
    types = grid_types(ones6)
    for (axis, j), t in types.items():
        if axis == "x":
            assert t == (0 if j % 2 == 0 else 2)
        else:
            assert t == (1 if j % 2 == 0 else 3)


def test_local_isometry(H, ones6):
    rep = verify_local_isometry(H, ones6)
    assert rep.ok and rep.checked == 144 and rep.cross_checked > 50


def test_corrupted_patch_fails(H):
    p = glue(H, FlatSpec.constant(2))
    p.cells[(1, 0)] = word_mul(p.cells[(1, 0)], ((0, 1),))
    assert not verify_local_isometry(H, p).ok
    p = glue(H, FlatSpec.constant(2))
    (g, n) = p.labels[((1, 1), (2, 1))]
    p.labels[((1, 1), (2, 1))] = (g, n + 1)
    p.labels[((2, 1), (1, 1))] = (g, -n - 1)
    assert check_block(H.params.m, p, (1, 0)) is not None


def test_axis_cells_are_diagonal_powers(H, ones6):
    for n in range(4):
        assert H.equal(ones6.cells[(2 * n, 0)], diagonal_words(0, n))


def test_label_growth(ones6):
    table = label_growth(ones6)
    assert table[0] == 0 and table[1] == 2 and table[2] == 16
    assert isinstance(table[6], Huge)
    assert strictly_increasing(table)


def test_mixed_parameters_hit_budget():
    H = HigmanGroup((2, 3, 5, 7))
    p = glue(H, FlatSpec.constant(2))
    assert verify_local_isometry(H, p).ok
    with pytest.raises(FlatTooLarge):
        glue(H, FlatSpec.constant(3))


def test_changing_k3_changes_two_quadrants(H):
    s1 = FlatSpec.constant(4)
    s2 = s1.with_entry(3, 1, 2)
    agree = quadrant_agreement(H, glue(H, s1), glue(H, s2))
    # k(3) feeds both the vertical axis of quadrant 2 and the horizontal axis of quadrant 3
    assert agree == ["agree", "agree", "differ", "differ"]
