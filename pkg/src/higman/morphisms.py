"""Endomorphism candidates of H: relator checks, exponent probes, shifts and
inner-automorphism decompositions."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import List, Optional, Sequence, Tuple

from .bs import britton_reduce
from .complex import Ball
from .words import (
    HigmanGroup,
    HWord,
    format_word,
    relators,
    word_inverse,
    word_mul,
    word_pow,
)

Candidate = Tuple[HWord, HWord, HWord, HWord]

HOM, NOT_HOM, TRIVIAL_HOM = "Hom", "NotHom", "TrivialHom"


def substitute(word: HWord, images: Sequence[HWord]) -> HWord:
    return word_mul(*(word_pow(images[g], e) for g, e in word)) if word else ()


def compose(f: Candidate, g: Candidate) -> Candidate:
    """f after g: a_i -> f(g(a_i))."""
    return tuple(substitute(g[i], f) for i in range(4))


def identity_candidate() -> Candidate:
    return tuple(((i, 1),) for i in range(4))


def shift_candidate(k: int) -> Candidate:
    return tuple((((i + k) % 4, 1),) for i in range(4))


def inner_candidate(g: HWord, k: int = 0) -> Candidate:
    """a_i -> g a_{i+k} g^-1."""
    gi = word_inverse(g)
    return tuple(word_mul(g, (((i + k) % 4, 1),), gi) for i in range(4))


@dataclass
class HomResult:
    status: str
    relator: Optional[int] = None  # first relator whose image is nontrivial

    def to_json(self) -> dict:
        return {"status": self.status, "relator": self.relator}


def hom_check(H: HigmanGroup, c: Candidate) -> HomResult:
    for i, r in enumerate(relators(H.params)):
        if not H.is_trivial(substitute(r, c)):
            return HomResult(NOT_HOM, i)
    if all(H.is_trivial(w) for w in c):
        return HomResult(TRIVIAL_HOM)
    return HomResult(HOM)


def m_adic_valuation(m: int, n: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    k = 0
    while n % m == 0:
        n //= m
        k += 1
    return k


@dataclass
class ProbeResult:
    exponents: Tuple[int, int, int, int]
    status: str
    cases: List[dict]

    def to_json(self) -> dict:
        return {"exponents": list(self.exponents), "status": self.status, "cases": self.cases}


def exponent_probe(H: HigmanGroup, n: Sequence[int]) -> ProbeResult:
    """Check a_i -> a_i^{n_i}; for each failing relator say which Britton case applies.

    The image of relator i is a^{n_i} b^{n_{i+1}} a^{-n_i} b^{-m_i n_{i+1}} in
    <a_i, a_{i+1}> = BS(1, m_i).  For n_i > 0 it equals b^{n_{i+1}(m^{n_i} - m)}.
    For n_i < 0, with k_i the m-adic valuation of n_{i+1}, either k_i < -n_i and
    the conjugate cannot be pinched away, or k_i >= -n_i and it collapses to a
    nonzero power of b.
    """
    if any(x == 0 for x in n):
        raise ValueError("exponents must be nonzero")
    n = tuple(n)
    cand = tuple(((i, n[i]),) for i in range(4))
    res = hom_check(H, cand)
    cases = []
    if res.status != HOM:
        for i, r in enumerate(relators(H.params)):
            if H.is_trivial(substitute(r, cand)):
                continue
            m = H.params[i]
            ni, nj = n[i], n[(i + 1) % 4]
            word = [("a", ni), ("b", nj), ("a", -ni), ("b", -m * nj)]
            witness = britton_reduce(m, word)
            entry = {"relator": i, "britton_normal_form": [[c, e] for c, e in witness]}
            if ni > 0:
                entry["case"] = "positive"
            else:
                k = m_adic_valuation(m, nj)
                entry["k"] = k
                entry["case"] = "k<-n" if k < -ni else "k>=-n"
            cases.append(entry)
    return ProbeResult(n, res.status, cases)


def probe_grid(H: HigmanGroup, bound: int = 3) -> List[ProbeResult]:
    values = [v for v in range(-bound, bound + 1) if v]
    return [exponent_probe(H, n) for n in product(values, repeat=4)]


@dataclass
class SpecialImage:
    corner: int
    square: Optional[HWord]

    def to_json(self) -> dict:
        return {"corner": self.corner, "square": None if self.square is None else format_word(self.square)}


def special_image_check(H: HigmanGroup, c: Candidate, ball: Ball) -> List[SpecialImage]:
    """For each corner (i, i+1), a ball vertex fixed by both f(a_i) and f(a_{i+1})."""
    out = []
    for i in range(4):
        x, y = c[i], c[(i + 1) % 4]
        found = None
        for s, corner in ball.vertices:
            g = ball.squares[s]
            gi = word_inverse(g)
            if H.vertex_membership(word_mul(gi, x, g), corner) and H.vertex_membership(word_mul(gi, y, g), corner):
                found = SpecialImage(corner, g)
                break
        out.append(found or SpecialImage(-1, None))
    return out


def conjugator_words(R: int):
    """Freely reduced words of length <= R in a_i^{+-1}, shortest first."""
    letters = [(i, e) for i in range(4) for e in (1, -1)]
    layer = [()]
    yield ()
    for _ in range(R):
        nxt = []
        for w in layer:
            for x in letters:
                if w and w[-1] == (x[0], -x[1]):
                    continue
                nxt.append(w + (x,))
        yield from nxt
        layer = nxt


def allowed_shifts(H: HigmanGroup) -> List[int]:
    m = H.params.m
    return [k for k in range(4) if all(m[i] == m[(i + k) % 4] for i in range(4))]


def automorphism_decompose(H: HigmanGroup, c: Candidate, R: int = 3) -> Optional[Tuple[int, HWord]]:
    """(k, g) with f(a_i) = g a_{i+k} g^-1 for every i, or None."""
    res = hom_check(H, c)
    if res.status != HOM:
        raise ValueError(f"not a nontrivial homomorphism: {res.status}")
    shifts = allowed_shifts(H)
    for g in conjugator_words(R):
        gi = word_inverse(g)
        for k in shifts:
            if all(H.equal(c[i], word_mul(g, (((i + k) % 4, 1),), gi)) for i in range(4)):
                return k, g
    return None
