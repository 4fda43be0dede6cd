"""Disc diagrams over X, combinatorial curvature and the Gauss-Bonnet audit.

Curvature is an integer in units of pi/2:
kappa(v) = 4 - 2 chi(link v) - n_v, with chi = (#link vertices) - (#link edges).
A disc has total curvature 4 units, that is 2 pi.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import networkx as nx

from .words import HigmanGroup, HWord, format_word, reduce_free, word_inverse, word_mul

TOTAL = 4  # 2 pi in units of pi/2


class VerificationError(AssertionError):
    pass


class FillLimitError(RuntimeError):
    pass


@dataclass
class Square:
    corners: Tuple[int, int, int, int]  # cyclic order
    image: Optional[HWord] = None  # the square image . C0 of X, when known
    key: Hashable = None  # display name (a patch cell, a gallery index, ...)


@dataclass
class DiscDiagram:
    squares: List[Square]
    dual_labels: Dict[Tuple[int, int], Tuple[int, int]] = field(default_factory=dict)
    edges: List[Tuple[int, int]] = field(default_factory=list)
    vertices: List[int] = field(default_factory=list)
    _edge_index: Dict[frozenset, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        verts = set()
        for sq in self.squares:
            cs = sq.corners
            verts.update(cs)
            for a, b in zip(cs, cs[1:] + cs[:1]):
                k = frozenset((a, b))
                if k not in self._edge_index:
                    self._edge_index[k] = len(self.edges)
                    self.edges.append((min(a, b), max(a, b)))
        self.vertices = sorted(verts)

    def square_edges(self, s: int) -> List[int]:
        cs = self.squares[s].corners
        return [self._edge_index[frozenset((a, b))] for a, b in zip(cs, cs[1:] + cs[:1])]

    def edge_squares(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {e: [] for e in range(len(self.edges))}
        for s in range(len(self.squares)):
            for e in self.square_edges(s):
                out[e].append(s)
        return out

    def boundary_edges(self) -> List[int]:
        return [e for e, sqs in self.edge_squares().items() if len(sqs) == 1]

    def euler(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.squares)

    def link(self, v: int) -> nx.MultiGraph:
        g = nx.MultiGraph()
        for s, sq in enumerate(self.squares):
            cs = sq.corners
            if v not in cs:
                continue
            j = cs.index(v)
            e1 = self._edge_index[frozenset((cs[j - 1], v))]
            e2 = self._edge_index[frozenset((v, cs[(j + 1) % 4]))]
            g.add_edge(e1, e2, square=s)
        return g

    def is_interior(self, v: int) -> bool:
        g = self.link(v)
        return g.number_of_nodes() > 0 and all(d == 2 for _, d in g.degree()) and nx.is_connected(g)

    def boundary_walk(self) -> Optional[List[int]]:
        """Boundary vertices in cyclic order, or None if the boundary is not one simple cycle."""
        g = nx.Graph()
        for e in self.boundary_edges():
            g.add_edge(*self.edges[e])
        if g.number_of_nodes() == 0 or any(d != 2 for _, d in g.degree()) or not nx.is_connected(g):
            return None
        start = min(g.nodes)
        walk, prev = [start], None
        cur = start
        while True:
            nxt = sorted(n for n in g.neighbors(cur) if n != prev)[0]
            if nxt == start:
                return walk
            walk.append(nxt)
            prev, cur = cur, nxt

    def to_json(self) -> dict:
        return {
            "vertices": self.vertices,
            "edges": [list(e) for e in self.edges],
            "squares": [
                {"corners": list(sq.corners), "image": None if sq.image is None else format_word(sq.image)}
                for sq in self.squares
            ],
            "boundary": sorted(self.boundary_edges()),
        }


def curvature(D: DiscDiagram, v: int) -> int:
    g = D.link(v)
    chi = g.number_of_nodes() - g.number_of_edges()
    n_v = g.number_of_edges()
    return 4 - 2 * chi - n_v


@dataclass
class CurvatureReport:
    kappa: Dict[int, int]
    total: int
    corners: List[int]
    interior: List[int]
    degenerate: bool

    @property
    def interior_max(self) -> int:
        return max((self.kappa[v] for v in self.interior), default=0)

    def to_json(self) -> dict:
        return {
            "kappa_units_of_half_pi": {str(v): k for v, k in sorted(self.kappa.items())},
            "total": self.total,
            "corners": self.corners,
            "degenerate": self.degenerate,
        }


def curvature_report(D: DiscDiagram) -> CurvatureReport:
    kappa = {v: curvature(D, v) for v in D.vertices}
    interior = [v for v in D.vertices if D.is_interior(v)]
    inner = set(interior)
    corners = [v for v in D.vertices if v not in inner and kappa[v] != 0]
    degenerate = D.boundary_walk() is None and bool(D.squares)
    return CurvatureReport(kappa, sum(kappa.values()), corners, interior, degenerate)


def gauss_bonnet(D: DiscDiagram) -> CurvatureReport:
    """Curvature report; raises if the total is not 2 pi or D is not a disc."""
    if D.squares and D.euler() != 1:
        raise VerificationError(f"Euler characteristic {D.euler()} != 1")
    overfull = [e for e, sqs in D.edge_squares().items() if len(sqs) > 2]
    if overfull:
        raise VerificationError(f"edges in more than two squares: {overfull[:5]}")
    rep = curvature_report(D)
    if D.squares and rep.total != TOTAL:
        raise VerificationError(f"total curvature {rep.total} units of pi/2, expected {TOTAL}")
    return rep


def is_reduced(D: DiscDiagram, H: Optional[HigmanGroup] = None) -> bool:
    """No two squares sharing an edge map to the same square of X."""
    for e, sqs in D.edge_squares().items():
        for s, t in combinations(sqs, 2):
            lab = D.dual_labels.get((s, t))
            a, b = D.squares[s].image, D.squares[t].image
            if lab is not None and lab[1] != 0:
                continue
            if a is None or b is None or H is None:
                return False
            if H.equal(a, b):
                return False
    return True


@dataclass
class GeodesicCheck:
    ok: bool
    interior_sum: int
    offending: List[int]


def geodesic_boundary_check(D: DiscDiagram, path: Sequence[int]) -> GeodesicCheck:
    """Curvature along the interior of a boundary path of a geodesic is at most pi/2.

    Equality needs both endpoints of the path to be positive corners.  The
    caller certifies that the path is geodesic in X.
    """
    bedges = {frozenset(D.edges[e]) for e in D.boundary_edges()}
    for a, b in zip(path, path[1:]):
        if frozenset((a, b)) not in bedges:
            raise ValueError(f"{a}-{b} is not a boundary edge")
    inner = list(path[1:-1])
    kappa = {v: curvature(D, v) for v in path}
    total = sum(kappa[v] for v in inner)
    ok = total < 1 or (total == 1 and kappa[path[0]] > 0 and kappa[path[-1]] > 0)
    offending = [v for v in inner if kappa[v] > 0] if not ok else []
    return GeodesicCheck(ok, total, offending)


# --- constructions ---------------------------------------------------------


def single_square(image: HWord = ()) -> DiscDiagram:
    return DiscDiagram([Square((0, 1, 2, 3), image, 0)])


def grid_diagram(width: int, height: int, images: Optional[Dict[Tuple[int, int], HWord]] = None,
                 labels: Optional[Dict] = None, origin: Tuple[int, int] = (0, 0)) -> DiscDiagram:
    """A width x height block of squares; cell (x, y) has corners at lattice points."""
    ox, oy = origin
    vid: Dict[Tuple[int, int], int] = {}

    def v(p):
        if p not in vid:
            vid[p] = len(vid)
        return vid[p]

    cells = [(ox + i, oy + j) for j in range(height) for i in range(width)]
    squares = []
    for x, y in cells:
        corners = (v((x, y)), v((x + 1, y)), v((x + 1, y + 1)), v((x, y + 1)))
        squares.append(Square(corners, None if images is None else images.get((x, y)), (x, y)))
    index = {c: k for k, c in enumerate(cells)}
    duals = {}
    if labels:
        for (c, d), lab in labels.items():
            if c in index and d in index:
                duals[(index[c], index[d])] = lab
    return DiscDiagram(squares, duals)


def patch_to_diagram(patch) -> DiscDiagram:
    """The flat patch on [-R, R]^2 as a (2R+1) x (2R+1) disc diagram."""
    R = patch.radius
    return grid_diagram(2 * R + 1, 2 * R + 1, patch.cells, patch.labels, origin=(-R, -R))


def gallery(word: HWord) -> List[Tuple[HWord, Optional[Tuple[int, int]]]]:
    """Squares C0, s1 C0, s1 s2 C0, ... visited by the syllables of word."""
    out = [((), None)]
    cur: HWord = ()
    for g, n in reduce_free(word):
        cur = word_mul(cur, ((g, n),))
        out.append((cur, (g, n)))
    return out


def fill_bounded(H: HigmanGroup, word: HWord, max_squares: int = 64, max_length: int = 400) -> Optional[DiscDiagram]:
    """A reduced disc diagram carrying the closed gallery of a trivial word.

    The syllables of ``word`` walk C0 through adjacent squares and back; the
    diagram is the union of the distinct squares visited, glued as in X.
    Returns None for a nontrivial word, or when the union is not a disc
    within ``max_squares`` squares.  Words longer than ``max_length``
    letters raise FillLimitError.
    """
    word = reduce_free(word)
    if sum(abs(e) for _, e in word) > max_length:
        raise FillLimitError(f"word longer than {max_length}")
    if not H.is_trivial(word):
        return None
    if not word:
        return DiscDiagram([])
    from .complex import Ball, SquareIndex, _materialize

    index = SquareIndex(H)
    steps = gallery(word)
    ids = []
    duals = {}
    for w, lab in steps:
        k = index.find(w)
        if k is None:
            if len(index) >= max_squares:
                return None
            k = index.add(w)
        if ids and lab is not None and ids[-1] != k:
            duals[(ids[-1], k)] = lab
            duals[(k, ids[-1])] = (lab[0], -lab[1])
        ids.append(k)
    dual_edges = sorted((a, b, g, n) for (a, b), (g, n) in duals.items())
    ball = Ball(H.params.m, 0, 0, list(index.words), [0] * len(index), dual_edges)
    _materialize(H, ball)
    squares = []
    for s, w in enumerate(ball.squares):
        corners = tuple(ball.square_vertex[(s, c)] for c in range(4))
        squares.append(Square(corners, w, s))
    D = DiscDiagram(squares, duals)
    if D.euler() != 1 or any(len(v) > 2 for v in D.edge_squares().values()):
        return None
    return D


def diagram_to_dot(D: DiscDiagram) -> str:
    kappa = {v: curvature(D, v) for v in D.vertices}
    lines = ["graph diagram {"]
    for v in D.vertices:
        lines.append(f'  v{v} [label="{v}: {kappa[v]}"];')
    for a, b in D.edges:
        lines.append(f"  v{a} -- v{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def diagram_to_json(D: DiscDiagram) -> str:
    return json.dumps(D.to_json(), sort_keys=True)
