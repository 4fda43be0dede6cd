"""How elements of H act on X: fixed sets, a bounded elliptic/hyperbolic
classification, weak acylindricity audits and free subgroup certificates."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx

from .bs import BSElem, bs_inv, bs_membership, bs_mul, gen_a
from .complex import Ball
from .words import HigmanGroup, HWord, format_word, word_inverse, word_mul, word_pow


class ShapeError(AssertionError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass
class FixedSet:
    owner: HWord
    vertices: List[int]
    edges: List[int]
    center: Optional[int]

    def is_empty(self) -> bool:
        return not self.vertices and not self.edges

    def to_json(self) -> dict:
        return {
            "owner": format_word(self.owner),
            "fixed_vertices": self.vertices,
            "fixed_edges": self.edges,
            "center": self.center,
        }


def _conj_by(g: HWord, h: HWord) -> HWord:
    """g^-1 h g."""
    return word_mul(word_inverse(g), h, g)


def check_shape(ball: Ball, vertices: Set[int], edges: Set[int]) -> Optional[int]:
    """Centre of a fixed set: a single vertex, or a star of edges pointing away
    from one vertex with no two of them in a common square.  Raises ShapeError."""
    if not edges:
        if len(vertices) > 1:
            raise ShapeError(f"{len(vertices)} fixed vertices but no fixed edge")
        return min(vertices) if vertices else None
    tails = {ball.edge_tail(e) for e in edges}
    if len(tails) != 1:
        raise ShapeError(f"fixed edges leave {len(tails)} different vertices")
    center = tails.pop()
    ends = {center} | {ball.edge_head(e) for e in edges}
    if ends != vertices:
        raise ShapeError("fixed vertices are not the endpoints of the fixed edges")
    for (s, c), v in ball.square_vertex.items():
        if v != center:
            continue
        at_center = {ball.square_edge[(s, c)], ball.square_edge[(s, (c + 1) % 4)]}
        if len(at_center & edges) > 1:
            raise ShapeError(f"two fixed edges in square {s}")
    return center


def fixed_set(H: HigmanGroup, h: HWord, ball: Ball, check: bool = True) -> FixedSet:
    if H.is_trivial(h):
        raise ValueError("the identity fixes everything")
    verts = set()
    for v, (s, c) in enumerate(ball.vertices):
        if H.vertex_membership(_conj_by(ball.squares[s], h), c):
            verts.add(v)
    edges = set()
    for e, (s, i, _) in enumerate(ball.edges):
        if ball.edge_tail(e) in verts and ball.edge_head(e) in verts:
            if H.edge_membership(_conj_by(ball.squares[s], h), i) is not None:
                edges.add(e)
    center = check_shape(ball, verts, edges) if check else None
    return FixedSet(h, sorted(verts), sorted(edges), center)


@dataclass
class IsometryClass:
    kind: str  # "elliptic" | "hyperbolic" | "unknown"
    radius: int
    fixed: Optional[FixedSet] = None
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        out = {"class": self.kind, "radius": self.radius}
        if self.fixed is not None:
            out.update(self.fixed.to_json())
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def diagonal(i: int) -> HWord:
    """a_i^-1 a_{i+2}^-1, which translates a flat along its axis."""
    return ((i % 4, -1), ((i + 2) % 4, -1))


def translation_witness(H: HigmanGroup, h: HWord, ball: Ball, max_power: int = 3) -> Optional[dict]:
    """g in the ball and s != 0 with g^-1 h g = (a_i^-1 a_{i+2}^-1)^s.

    Then h shifts the flat squares g (a_i^-1 a_{i+2}^-1)^n C0 by s steps.
    """
    for s_idx, g in enumerate(ball.squares):
        c = _conj_by(g, h)
        for i in range(4):
            for s in range(1, max_power + 1):
                for sgn in (1, -1):
                    if H.equal(c, word_pow(diagonal(i), sgn * s)):
                        return {"conjugator": format_word(g), "diagonal": i, "shift": sgn * s}
    return None


def classify(H: HigmanGroup, h: HWord, ball: Ball) -> IsometryClass:
    """Elliptic with a concrete fixed vertex, hyperbolic with a translation
    witness, otherwise unknown at this radius."""
    fs = fixed_set(H, h, ball)
    if fs.vertices:
        return IsometryClass("elliptic", ball.radius, fs)
    w = translation_witness(H, h, ball)
    if w is not None:
        return IsometryClass("hyperbolic", ball.radius, fs, w)
    return IsometryClass("unknown", ball.radius, fs)


@dataclass
class StableFixedSet:
    owner: HWord
    bound: int
    vertices: List[int]
    edges: List[int]
    strict: bool  # strictly larger than Fix(h)


def stable_fixed_set(H: HigmanGroup, h: HWord, M: int, ball: Ball) -> StableFixedSet:
    if M < 1:
        raise ValueError("M must be >= 1")
    base = fixed_set(H, h, ball)
    verts, edges = set(base.vertices), set(base.edges)
    for n in range(2, M + 1):
        fs = fixed_set(H, word_pow(h, n), ball)
        verts |= set(fs.vertices)
        edges |= set(fs.edges)
    strict = verts != set(base.vertices) or edges != set(base.edges)
    return StableFixedSet(h, M, sorted(verts), sorted(edges), strict)


@dataclass
class AcylindricityReport:
    paths_checked: int
    spot_checks: int
    violations: List[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def three_paths(ball: Ball):
    """Embedded edge paths of length 3 in the 1-skeleton, each once per direction."""
    skel = ball.skeleton()
    inc: Dict[int, List[Tuple[int, int]]] = {v: [] for v in skel.nodes}
    for t, hd, e in skel.edges(keys=True):
        inc[t].append((e, hd))
        inc[hd].append((e, t))
    for e2 in range(len(ball.edges)):
        v1, v2 = ball.edge_tail(e2), ball.edge_head(e2)
        for e1, v0 in inc[v1]:
            if e1 == e2 or v0 == v2:
                continue
            for e3, v3 in inc[v2]:
                if e3 in (e1, e2) or v3 in (v0, v1):
                    continue
                yield (v0, v1, v2, v3), (e1, e2, e3)


def _incoming(ball: Ball, v: int, e: int) -> bool:
    return ball.edge_head(e) == v


def acylindricity_audit(H: HigmanGroup, ball: Ball, spot_checks: int = 200, max_exp: int = 20,
                        seed: int = 0) -> AcylindricityReport:
    """(a) Every embedded 3-path has an interior vertex with an incoming path edge.
    (b) In BS(1, m): g<a>g^-1 meets <a> trivially for g outside <a>, exponents up to max_exp."""
    violations = []
    paths = 0
    for (v0, v1, v2, v3), (e1, e2, e3) in three_paths(ball):
        paths += 1
        if not (_incoming(ball, v1, e1) or _incoming(ball, v1, e2) or _incoming(ball, v2, e2) or _incoming(ball, v2, e3)):
            violations.append(("path", (v0, v1, v2, v3)))
    rng = random.Random(seed)
    ms = sorted(set(H.params.m))
    for k in range(spot_checks):
        m = ms[k % len(ms)]
        t = 0
        while t == 0:
            t = rng.randint(-50, 50)
        g = BSElem.make(m, (t, rng.randint(0, 4)), rng.randint(-5, 5))
        gi = bs_inv(g)
        for n in range(-max_exp, max_exp + 1):
            if n and bs_membership(bs_mul(bs_mul(g, gen_a(m, n)), gi), "a") is not None:
                violations.append(("bs", m, g.to_json(), n))
    return AcylindricityReport(paths, spot_checks, violations)


@dataclass
class FreeCertificate:
    g: HWord
    h: HWord
    checked: int
    checked_at_length: int
    trivial: List[str]

    @property
    def ok(self) -> bool:
        return not self.trivial

    def to_json(self) -> dict:
        return {
            "g": format_word(self.g),
            "h": format_word(self.h),
            "checked": self.checked,
            "checked_at_max_length": self.checked_at_length,
            "violations": self.trivial,
        }


def reduced_words(L: int):
    """Nonempty freely reduced words of length <= L in x0, x1 and inverses, as (index, sign) tuples."""
    letters = [(0, 1), (0, -1), (1, 1), (1, -1)]
    frontier = [()]
    for _ in range(L):
        nxt = []
        for w in frontier:
            for x in letters:
                if w and w[-1] == (x[0], -x[1]):
                    continue
                nxt.append(w + (x,))
        yield from nxt
        frontier = nxt


def free_certificate(H: HigmanGroup, a: HWord, b: HWord, k: int, l: int, L: int, ball: Ball) -> FreeCertificate:
    """Check that g = b^l a^k and h = a^k b^l generate no relation of length <= L."""
    if k < 1 or l < 1:
        raise ValueError("k and l must be >= 1")
    fa, fb = fixed_set(H, a, ball), fixed_set(H, b, ball)
    if not fa.vertices or not fb.vertices:
        raise PreconditionError("a and b must both fix a vertex of the ball")
    if set(fa.vertices) & set(fb.vertices) or set(fa.edges) & set(fb.edges):
        raise PreconditionError("fixed sets of a and b meet in the ball")
    g = word_mul(word_pow(b, l), word_pow(a, k))
    h = word_mul(word_pow(a, k), word_pow(b, l))
    gens = (g, h)
    checked = at_L = 0
    trivial = []
    for w in reduced_words(L):
        word = word_mul(*(word_pow(gens[i], s) for i, s in w))
        checked += 1
        at_L += len(w) == L
        if H.is_trivial(word):
            trivial.append(" ".join(("g" if i == 0 else "h") + ("" if s > 0 else "^-1") for i, s in w))
    return FreeCertificate(g, h, checked, at_L, trivial)
