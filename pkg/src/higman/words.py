"""Word problem for Higman-like groups.

``H = <a0, a1, a2, a3 | a_i a_{i+1} a_i^-1 = a_{i+1}^{m_i}>`` splits as
``G_a *_F G_b`` with ``G_a = <a0, a1, a2>``, ``G_b = <a2, a3, a0>`` and
``F = <a0, a2>`` free.  Each triangle group is itself an amalgam of two
Baumslag-Solitar vertex groups over a cyclic edge group::

    G_a = <a0, a1> *_<a1> <a1, a2>        G_b = <a2, a3> *_<a3> <a3, a0>

Reduction is a stack machine at both levels; every membership question
ends up as exact coordinate arithmetic in some BS(1, m_i).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .bs import A_FIRST, B_FIRST, BSElem, bs_factor, bs_inv, bs_mul, gen_a, gen_b

Letter = Tuple[int, int]
HWord = Tuple[Letter, ...]

SIDE_A = "a"
SIDE_B = "b"
_SIDE_OFFSET = {SIDE_A: 0, SIDE_B: 2}


@dataclass(frozen=True)
class HigmanParams:
    m: Tuple[int, int, int, int] = (2, 2, 2, 2)

    def __post_init__(self):
        m = tuple(int(x) for x in self.m)
        if len(m) != 4:
            raise ValueError("need exactly four parameters m0..m3")
        if any(x < 2 for x in m):
            raise ValueError(f"every m_i must be >= 2, got {m}")
        object.__setattr__(self, "m", m)

    def __getitem__(self, i: int) -> int:
        return self.m[i % 4]


# --- word syntax -------------------------------------------------------------

_TOKEN = re.compile(r"a([0-3])(?:\^([+-]?\d+))?")


def parse_word(text: str) -> HWord:
    """Parse ``"a0 a1 a0^-1 a1^-2"``; errors report the character position."""
    letters = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN.match(text, pos)
        end = match.end() if match else pos
        if not match or (end < n and not text[end].isspace()):
            raise ValueError(f"cannot parse word at position {pos}: {text[pos:pos + 12]!r}")
        letters.append((int(match.group(1)), int(match.group(2) or 1)))
        pos = end
    return reduce_free(letters)


def format_word(word: Sequence[Letter]) -> str:
    return " ".join(f"a{i}" if e == 1 else f"a{i}^{e}" for i, e in word)


def reduce_free(word: Iterable[Letter]) -> HWord:
    out: List[Letter] = []
    for i, e in word:
        i %= 4
        if e == 0:
            continue
        if out and out[-1][0] == i:
            e += out.pop()[1]
            if e == 0:
                continue
        out.append((i, e))
    return tuple(out)


def word_inverse(word: Sequence[Letter]) -> HWord:
    return tuple((i, -e) for i, e in reversed(word))


def word_mul(*words: Sequence[Letter]) -> HWord:
    return reduce_free(letter for w in words for letter in w)


def word_pow(word: Sequence[Letter], n: int) -> HWord:
    if n < 0:
        word, n = word_inverse(word), -n
    return reduce_free(tuple(word) * n)


def word_conj(g: Sequence[Letter], h: Sequence[Letter]) -> HWord:
    """``h g h^-1``."""
    return word_mul(h, g, word_inverse(h))


def gen(i: int, e: int = 1) -> HWord:
    return reduce_free([(i, e)])


def relator(params: HigmanParams, i: int) -> HWord:
    j = (i + 1) % 4
    return reduce_free([(i % 4, 1), (j, 1), (i % 4, -1), (j, -params[i])])


def relators(params: HigmanParams) -> List[HWord]:
    return [relator(params, i) for i in range(4)]


def abelianization_class(params: HigmanParams, word: Sequence[Letter]) -> Tuple[int, ...]:
    """Exponent sums, the one of a_i taken modulo m_{i-1} - 1."""
    sums = [0, 0, 0, 0]
    for i, e in word:
        sums[i] += e
    return tuple(sums[i] % (params[i - 1] - 1) for i in range(4))


# --- triangle groups ---------------------------------------------------------

Syllable = Tuple[int, BSElem]


@dataclass(frozen=True)
class TriElem:
    """Reduced element of a triangle group; ``offset`` 0 is G_a, 2 is G_b.

    Factor 0 is ``<a_s, a_{s+1}>`` (a_s stable), factor 1 is
    ``<a_{s+1}, a_{s+2}>`` (a_{s+1} stable).  A lone syllable may lie in the
    edge group ``<a_{s+1}>``; longer forms never contain one.
    """

    offset: int
    syllables: Tuple[Syllable, ...] = ()

    def is_identity(self) -> bool:
        return not self.syllables

    def __len__(self) -> int:
        return len(self.syllables)


class Triangle:
    def __init__(self, params: HigmanParams, offset: int):
        self.params = params
        self.offset = offset
        self.ms = (params[offset], params[offset + 1])

    # edge group <a_{s+1}> seen inside factor f
    def edge_exp(self, f: int, x: BSElem) -> Optional[int]:
        if f == 0:
            return x.num if x.k == 0 and x.mexp == 0 else None
        return x.k if x.num == 0 else None

    def edge_elem(self, f: int, z: int) -> BSElem:
        return gen_b(self.ms[0], z) if f == 0 else gen_a(self.ms[1], z)

    def letter(self, i: int, e: int) -> Syllable:
        idx = (i - self.offset) % 4
        if idx == 0:
            return 0, gen_a(self.ms[0], e)
        if idx == 1:
            return 0, gen_b(self.ms[0], e)
        if idx == 2:
            return 1, gen_b(self.ms[1], e)
        raise ValueError(f"a{i} is not in the triangle group at offset {self.offset}")

    def push(self, stack: List[Syllable], f: int, x: BSElem) -> None:
        """Right-multiply the reduced form held in ``stack`` by a syllable."""
        while True:
            if x.is_identity():
                return
            z = self.edge_exp(f, x)
            if not stack:
                stack.append((f, x))
                return
            f0, y = stack[-1]
            if z is not None:
                stack.pop()
                f, x = f0, bs_mul(y, self.edge_elem(f0, z))
                continue
            if f0 == f:
                stack.pop()
                x = bs_mul(y, x)
                continue
            z0 = self.edge_exp(f0, y)
            if z0 is not None:
                # a lone edge syllable gets absorbed into the newcomer
                stack.pop()
                x = bs_mul(self.edge_elem(f, z0), x)
                continue
            stack.append((f, x))
            return

    def reduce(self, word: Iterable[Letter]) -> TriElem:
        stack: List[Syllable] = []
        for i, e in word:
            self.push(stack, *self.letter(i, e))
        return TriElem(self.offset, tuple(stack))

    def mul(self, g: TriElem, word: Iterable[Letter]) -> TriElem:
        stack = list(g.syllables)
        for i, e in word:
            self.push(stack, *self.letter(i, e))
        return TriElem(self.offset, tuple(stack))

    def f_word(self, syllables: Sequence[Syllable]) -> Optional[HWord]:
        """The unique reduced word in a_s, a_{s+2} equal to the element, if any."""
        if not syllables:
            return ()
        if len(syllables) == 1 and self.edge_exp(*syllables[0]) is not None:
            return None
        s = self.offset
        out: List[Letter] = []
        carry = 0
        for f, x in syllables:
            y = bs_mul(self.edge_elem(f, carry), x)
            if f == 0:
                fac = bs_factor(y, A_FIRST)
                if fac is None or fac[0] == 0:
                    return None
                out.append((s, fac[0]))
                carry = fac[1]
            else:
                fac = bs_factor(y, B_FIRST)
                if fac is None or fac[1] == 0:
                    return None
                out.append(((s + 2) % 4, fac[1]))
                carry = fac[0]
        if carry != 0:
            return None
        return tuple(out)

    def canonical_key(self, g: TriElem) -> tuple:
        """Left-transversal normal form ``t_1 ... t_n c`` as a hashable key."""
        carry = 0
        key = []
        for f, x in g.syllables:
            y = bs_mul(self.edge_elem(f, carry), x)
            m = self.ms[f]
            if f == 0:
                e = y.mexp + y.k
                if e > 0:
                    r = BSElem.make(m, (y.num % m ** e, y.mexp), y.k)
                else:
                    r = BSElem(m, 0, 0, y.k)
                # r^-1 y lies in <b>
                carry = bs_factor(bs_mul(bs_inv(r), y), B_FIRST)[1]
            else:
                r = BSElem(m, y.num, y.mexp, 0)
                carry = y.k
            if not r.is_identity():
                key.append((f, r.num, r.mexp, r.k))
        return tuple(key), carry

    def vertex_coords(self, g: TriElem, f: int) -> Optional[BSElem]:
        """Coordinates of g inside factor f, or None if g is outside it."""
        if not g.syllables:
            return BSElem(self.ms[f], 0, 0, 0)
        if len(g.syllables) > 1:
            return None
        f0, x = g.syllables[0]
        if f0 == f:
            return x
        z = self.edge_exp(f0, x)
        return None if z is None else self.edge_elem(f, z)


# --- the amalgam H = G_a *_F G_b --------------------------------------------


@dataclass(frozen=True)
class HElem:
    """Reduced block decomposition of an element of H.

    ``blocks`` alternate between G_a and G_b and none lies in F.  When there
    are no blocks the element lies in F and ``fword`` is its reduced word;
    the identity is the element with neither blocks nor F-word.
    """

    blocks: Tuple[Tuple[str, TriElem], ...] = ()
    fword: HWord = ()

    def is_identity(self) -> bool:
        return not self.blocks and not self.fword

    @property
    def shape(self) -> Tuple[str, ...]:
        if not self.blocks:
            return ("F",) if self.fword else ()
        return tuple(side for side, _ in self.blocks)


def _side_of(i: int) -> Optional[str]:
    if i == 1:
        return SIDE_A
    if i == 3:
        return SIDE_B
    return None


class HigmanGroup:
    """Word problem and membership oracles for one parameter tuple."""

    def __init__(self, params: HigmanParams | Sequence[int] = (2, 2, 2, 2), cache_size: int = 200_000):
        if not isinstance(params, HigmanParams):
            params = HigmanParams(tuple(params))
        self.params = params
        self.tri = {SIDE_A: Triangle(params, 0), SIDE_B: Triangle(params, 2)}
        self._cache: Dict[HWord, HElem] = {}
        self._cache_size = cache_size

    def __repr__(self):
        return f"HigmanGroup{self.params.m}"

    # -- reduction --

    def ga_reduce(self, word: Iterable[Letter]) -> TriElem:
        return self.tri[SIDE_A].reduce(word)

    def gb_reduce(self, word: Iterable[Letter]) -> TriElem:
        return self.tri[SIDE_B].reduce(word)

    def f_membership(self, g: TriElem) -> Optional[HWord]:
        side = SIDE_A if g.offset == 0 else SIDE_B
        return self.tri[side].f_word(g.syllables)

    def reduce(self, word: Sequence[Letter]) -> HElem:
        word = reduce_free(word)
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        result = self._reduce(word)
        if len(self._cache) >= self._cache_size:
            self._cache.clear()
        self._cache[word] = result
        return result

    def _reduce(self, word: HWord) -> HElem:
        stack: List[list] = []  # [side, syllable list]

        def feed(block: list, letters: Iterable[Letter]) -> None:
            tri = self.tri[block[0]]
            for i, e in letters:
                tri.push(block[1], *tri.letter(i, e))

        def close_top() -> Optional[HWord]:
            """Fold the top block into its neighbour if it lies in F.

            Returns the F-word when the stack became empty, else None.
            """
            side, syl = stack[-1]
            w = self.tri[side].f_word(syl)
            if w is None:
                return None
            stack.pop()
            if stack:
                feed(stack[-1], w)
                return None
            return w

        for i, e in word:
            need = _side_of(i)
            if stack and (need is None or stack[-1][0] == need):
                feed(stack[-1], [(i, e)])
                continue
            pending: HWord = ()
            if stack:
                pending = close_top() or ()
            if stack and stack[-1][0] == need:
                feed(stack[-1], [(i, e)])
                continue
            block = [need or SIDE_A, []]
            stack.append(block)
            feed(block, pending)
            feed(block, [(i, e)])

        while stack:
            side, syl = stack[-1]
            w = self.tri[side].f_word(syl)
            if w is None:
                break
            stack.pop()
            if not stack:
                return HElem((), reduce_free(w))
            feed(stack[-1], w)
        blocks = tuple((side, TriElem(_SIDE_OFFSET[side], tuple(syl))) for side, syl in stack)
        return HElem(blocks, ())

    def is_trivial(self, word: Sequence[Letter]) -> bool:
        return self.reduce(word).is_identity()

    def equal(self, w1: Sequence[Letter], w2: Sequence[Letter]) -> bool:
        if abelianization_class(self.params, w1) != abelianization_class(self.params, w2):
            return False
        return self.is_trivial(word_mul(w1, word_inverse(w2)))

    def mul(self, *words: Sequence[Letter]) -> HElem:
        return self.reduce(word_mul(*words))

    def inv(self, word: Sequence[Letter]) -> HWord:
        return word_inverse(word)

    def conj(self, g: Sequence[Letter], h: Sequence[Letter]) -> HElem:
        return self.reduce(word_conj(g, h))

    # -- membership --

    def vertex_coords(self, word: Sequence[Letter], i: int) -> Optional[BSElem]:
        """Coordinates in BS(1, m_i) (a_i stable) if the element lies in <a_i, a_{i+1}>."""
        i %= 4
        side = SIDE_A if i in (0, 1) else SIDE_B
        f = i - _SIDE_OFFSET[side]
        tri = self.tri[side]
        red = self.reduce(word)
        if len(red.blocks) > 1:
            return None
        if red.blocks:
            if red.blocks[0][0] != side:
                return None
            g = red.blocks[0][1]
        else:
            g = tri.reduce(red.fword)
        return tri.vertex_coords(g, f)

    def vertex_membership(self, word: Sequence[Letter], i: int) -> bool:
        return self.vertex_coords(word, i) is not None

    def edge_membership(self, word: Sequence[Letter], i: int) -> Optional[int]:
        x = self.vertex_coords(word, i)
        if x is None or x.num != 0:
            return None
        return x.k

    def abelianization_class(self, word: Sequence[Letter]) -> Tuple[int, ...]:
        return abelianization_class(self.params, word)

    def shape_key(self, word: Sequence[Letter]) -> Tuple[tuple, bool]:
        """Hash key for the element and whether it is a complete invariant.

        F-elements and single-block elements get an exact canonical key;
        longer elements only get abelianization plus block sides.
        """
        red = self.reduce(word)
        ab = self.abelianization_class(word)
        if not red.blocks:
            return ("F", red.fword), True
        if len(red.blocks) == 1:
            side, g = red.blocks[0]
            return (side, self.tri[side].canonical_key(g)), True
        return (ab, red.shape), False


# module-level conveniences mirroring the operation names


def h_reduce(params: HigmanParams, word: Sequence[Letter]) -> HElem:
    return HigmanGroup(params).reduce(word)


def h_is_trivial(params: HigmanParams, word: Sequence[Letter]) -> bool:
    return HigmanGroup(params).is_trivial(word)


def h_equal(params: HigmanParams, w1: Sequence[Letter], w2: Sequence[Letter]) -> bool:
    return HigmanGroup(params).equal(w1, w2)
