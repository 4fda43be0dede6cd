"""Lazy balls of the CAT(0) square complex X of a Higman-like group.

Squares of X are in bijection with group elements: ``h`` names the square
``h C0``.  The type-i edge of ``h C0`` has stabilizer ``h <a_i> h^-1`` and the
corner ``(i, i+1)`` has stabilizer ``h <a_i, a_{i+1}> h^-1``.  Two squares
are adjacent across a type-i edge iff they differ by a nonzero power of
``a_i`` on the right.

Edges are oriented towards the corner where their stabilizer is undistorted:
the type-i edge points to corner ``(i, i+1)``, where ``a_i`` is the stable
letter.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.utils import UnionFind

from .bs import BSElem, bs_eval, bs_inv, bs_mul, gen_a, gen_b
from .words import (
    HigmanGroup,
    HWord,
    format_word,
    parse_word,
    word_inverse,
    word_mul,
)


class ResourceLimitError(RuntimeError):
    pass


def exponent_order(N: int) -> List[int]:
    return [n for n in range(-N, N + 1) if n]


def neighbors(word: HWord, i: int, N: int) -> List[Tuple[HWord, Tuple[int, int]]]:
    """Squares across the type-i edge of ``word C0``, exponents up to N."""
    if N < 1:
        raise ValueError("truncation must be >= 1")
    return [(word_mul(word, ((i, n),)), (i, n)) for n in exponent_order(N)]


def edge_orientation(i: int) -> int:
    """Corner (as its first index) that the type-i edge of a square points to."""
    return i % 4


def edge_tail(i: int) -> int:
    return (i - 1) % 4


class SquareIndex:
    """Dedup index for squares: exact canonical keys where available,
    otherwise buckets resolved with the equality oracle."""

    def __init__(self, H: HigmanGroup):
        self.H = H
        self.words: List[HWord] = []
        self._exact: Dict[tuple, int] = {}
        self._buckets: Dict[tuple, List[int]] = defaultdict(list)
        self.oracle_calls = 0

    def __len__(self):
        return len(self.words)

    def find(self, word: HWord) -> Optional[int]:
        key, exact = self.H.shape_key(word)
        if exact:
            return self._exact.get(key)
        for idx in self._buckets[key]:
            self.oracle_calls += 1
            if self.H.is_trivial(word_mul(word_inverse(self.words[idx]), word)):
                return idx
        return None

    def add(self, word: HWord) -> int:
        key, exact = self.H.shape_key(word)
        idx = len(self.words)
        self.words.append(word)
        if exact:
            self._exact[key] = idx
        else:
            self._buckets[key].append(idx)
        return idx


@dataclass
class Ball:
    params: Tuple[int, int, int, int]
    radius: int
    truncation: int
    squares: List[HWord]
    generation: List[int]
    dual_edges: List[Tuple[int, int, int, int]]  # (from, to, gen, exp), both orientations
    vertices: List[Tuple[int, int]] = field(default_factory=list)  # (square, corner)
    edges: List[Tuple[int, int, int]] = field(default_factory=list)  # (square, type, to_vertex)
    square_vertex: Dict[Tuple[int, int], int] = field(default_factory=dict)
    square_edge: Dict[Tuple[int, int], int] = field(default_factory=dict)

    @property
    def m(self):
        return self.params

    def edge_tail(self, e: int) -> int:
        s, i, _ = self.edges[e]
        return self.square_vertex[(s, (i - 1) % 4)]

    def edge_head(self, e: int) -> int:
        return self.edges[e][2]

    def labels(self) -> Dict[Tuple[int, int], Tuple[int, int]]:
        return {(a, b): (g, n) for a, b, g, n in self.dual_edges}

    def squares_at_vertex(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = defaultdict(list)
        for (s, _), v in sorted(self.square_vertex.items()):
            out[v].append(s)
        return out

    def skeleton(self) -> nx.MultiDiGraph:
        """Oriented, typed 1-skeleton spanned by the squares of the ball."""
        g = nx.MultiDiGraph()
        g.add_nodes_from(range(len(self.vertices)))
        for e, (s, i, head) in enumerate(self.edges):
            g.add_edge(self.edge_tail(e), head, key=e, type=i)
        return g

    # -- serialization --

    def to_json(self) -> dict:
        return {
            "params": list(self.params),
            "radius": self.radius,
            "truncation": self.truncation,
            "squares": [{"id": k, "word": format_word(w)} for k, w in enumerate(self.squares)],
            "generation": list(self.generation),
            "dual_edges": [{"from": a, "to": b, "gen": g, "exp": n} for a, b, g, n in self.dual_edges],
            "vertices": [{"id": k, "square": s, "corner": c} for k, (s, c) in enumerate(self.vertices)],
            "edges": [{"id": k, "square": s, "type": i, "to_vertex": v} for k, (s, i, v) in enumerate(self.edges)],
            "square_vertex": [[s, c, v] for (s, c), v in sorted(self.square_vertex.items())],
            "square_edge": [[s, i, e] for (s, i), e in sorted(self.square_edge.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Ball":
        squares = [parse_word(sq["word"]) for sq in data["squares"]]
        vertices = [(v["square"], v["corner"]) for v in data["vertices"]]
        edges = [(e["square"], e["type"], e["to_vertex"]) for e in data["edges"]]
        ball = cls(
            params=tuple(data["params"]),
            radius=data["radius"],
            truncation=data["truncation"],
            squares=squares,
            generation=list(data.get("generation", [0] * len(squares))),
            dual_edges=[(d["from"], d["to"], d["gen"], d["exp"]) for d in data["dual_edges"]],
            vertices=vertices,
            edges=edges,
        )
        for s, c, v in data["square_vertex"]:
            ball.square_vertex[(s, c)] = v
        for s, i, e in data["square_edge"]:
            ball.square_edge[(s, i)] = e
        return ball


def build_ball(H: HigmanGroup, r: int, N: int = 3, cap: int = 50_000) -> Ball:
    """Gallery ball of radius r around C0, exponents truncated at N."""
    if r < 0 or N < 1:
        raise ValueError("need r >= 0 and N >= 1")
    index = SquareIndex(H)
    index.add(())
    generation = [0]
    duals: Dict[Tuple[int, int], Tuple[int, int]] = {}
    frontier = [0]
    for step in range(1, r + 1):
        nxt = []
        for s in frontier:
            for i in range(4):
                for w, (g, n) in neighbors(index.words[s], i, N):
                    t = index.find(w)
                    if t is None:
                        if len(index) >= cap:
                            raise ResourceLimitError(f"square cap {cap} exceeded at radius {step}")
                        t = index.add(w)
                        generation.append(step)
                        nxt.append(t)
                    duals[(s, t)] = (g, n)
                    duals[(t, s)] = (g, -n)
        frontier = nxt
    # adjacencies among the outermost squares
    for s in frontier:
        for i in range(4):
            for w, (g, n) in neighbors(index.words[s], i, N):
                t = index.find(w)
                if t is not None:
                    duals[(s, t)] = (g, n)
                    duals[(t, s)] = (g, -n)
    dual_edges = sorted((a, b, g, n) for (a, b), (g, n) in duals.items())
    ball = Ball(H.params.m, r, N, list(index.words), generation, dual_edges)
    _materialize(H, ball)
    return ball


def _materialize(H: HigmanGroup, ball: Ball) -> None:
    """Vertices and edges as equivalence classes of (square, corner/type)."""
    n = len(ball.squares)
    v_uf, e_uf = UnionFind(), UnionFind()
    for s in range(n):
        for c in range(4):
            v_uf[(s, c)]
            e_uf[(s, c)]
    for a, b, g, _ in ball.dual_edges:
        if a < b:
            e_uf.union((a, g), (b, g))
            v_uf.union((a, g), (b, g))
            v_uf.union((a, (g - 1) % 4), (b, (g - 1) % 4))

    def merge_classes(uf: UnionFind, test) -> Dict[Tuple[int, int], Tuple[int, int]]:
        reps: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
        for grp in uf.to_sets():
            rep = min(grp)
            reps[rep[1]].append(rep)
        for c, lst in reps.items():
            lst.sort()
            for x, y in combinations(lst, 2):
                if uf[x] == uf[y]:
                    continue
                q = word_mul(word_inverse(ball.squares[x[0]]), ball.squares[y[0]])
                if test(q, c):
                    uf.union(x, y)
        return {k: min(grp) for grp in uf.to_sets() for k in grp}

    v_rep = merge_classes(v_uf, H.vertex_membership)
    e_rep = merge_classes(e_uf, lambda q, i: H.edge_membership(q, i) is not None)

    vid: Dict[Tuple[int, int], int] = {}
    for s in range(n):
        for c in range(4):
            rep = v_rep[(s, c)]
            if rep not in vid:
                vid[rep] = len(ball.vertices)
                ball.vertices.append(rep)
            ball.square_vertex[(s, c)] = vid[rep]
    eid: Dict[Tuple[int, int], int] = {}
    for s in range(n):
        for i in range(4):
            rep = e_rep[(s, i)]
            if rep not in eid:
                eid[rep] = len(ball.edges)
                ball.edges.append((rep[0], i, ball.square_vertex[(rep[0], edge_orientation(i))]))
            ball.square_edge[(s, i)] = eid[rep]


def dedup_violations(H: HigmanGroup, ball: Ball) -> List[tuple]:
    """Pairs of listed squares that are equal, and dual edges whose label lies."""
    bad = []
    for a, b in combinations(range(len(ball.squares)), 2):
        if H.equal(ball.squares[a], ball.squares[b]):
            bad.append(("duplicate", a, b))
    for a, b, g, n in ball.dual_edges:
        if not H.equal(word_mul(ball.squares[a], ((g, n),)), ball.squares[b]):
            bad.append(("label", a, b, g, n))
    return bad


# --- links -------------------------------------------------------------------


def a_coset_key(x: BSElem) -> tuple:
    """Key of the left coset x<a> (the type-i edge at the corner)."""
    return ("a", x.num, x.mexp)


def b_coset_key(x: BSElem) -> tuple:
    """Key of the left coset x<b>: t reduced modulo m^k."""
    e = x.mexp + x.k
    if e > 0:
        r = BSElem.make(x.m, (x.num % x.m**e, x.mexp), x.k)
        return ("b", r.num, r.mexp, x.k)
    return ("b", 0, 0, x.k)


@dataclass
class LinkGraph:
    corner: int
    m: int
    truncation: int
    graph: nx.Graph
    elements: Dict[tuple, BSElem]

    @property
    def girth(self) -> float:
        return nx.girth(self.graph)

    def is_bipartite(self) -> bool:
        return nx.is_bipartite(self.graph) and all(
            (u[0] == "a") != (v[0] == "a") for u, v in self.graph.edges
        )

    def is_simple(self) -> bool:
        # one link edge per element; parallel edges would need two elements
        # with the same pair of cosets
        return self.graph.number_of_edges() == len(self.elements)


def link_elements(m: int, N: int, depth: int = 4) -> Dict[tuple, BSElem]:
    """Elements a^p1 b^q1 a^p2 ... with at most ``depth`` syllables, |exp| <= N."""
    seen: Dict[tuple, BSElem] = {}
    layer = [(BSElem(m, 0, 0, 0), None)]
    key = lambda x: (x.num, x.mexp, x.k)
    seen[key(layer[0][0])] = layer[0][0]
    for _ in range(depth):
        nxt = []
        for x, last in layer:
            for kind in ("a", "b"):
                if kind == last:
                    continue
                for n in exponent_order(N):
                    y = bs_mul(x, gen_a(m, n) if kind == "a" else gen_b(m, n))
                    if key(y) not in seen:
                        seen[key(y)] = y
                        nxt.append((y, kind))
        layer = nxt
    return seen


def link_graph(H: HigmanGroup, corner: int, N: int = 3, depth: int = 4) -> LinkGraph:
    """Truncated link of the corner (i, i+1) vertex of C0 (links of all
    vertices in that orbit are isomorphic to this one)."""
    i = corner % 4
    m = H.params[i]
    elements = link_elements(m, N, depth)
    g = nx.Graph()
    for x in elements.values():
        g.add_edge(a_coset_key(x), b_coset_key(x))
    return LinkGraph(i, m, N, g, elements)


def link_completion(m: int, p1: int, q1: int) -> Optional[Tuple[int, int]]:
    """The unique (p2, q2) closing a^p1 b^q1 a^p2 b^q2 = 1, if integral."""
    q2 = -Fraction(m) ** p1 * q1
    if q2.denominator != 1:
        return None
    return -p1, int(q2)


def brute_force_completion(m: int, p1: int, q1: int, bound: int) -> List[Tuple[int, int]]:
    """All (p2, q2) with |p2|, |q2| <= bound closing the 4-cycle; independent check."""
    out = []
    for p2 in range(-bound, bound + 1):
        for q2 in range(-bound, bound + 1):
            if bs_eval(m, [("a", p1), ("b", q1), ("a", p2), ("b", q2)]).is_identity():
                out.append((p2, q2))
    return out


@dataclass
class Grid2x2:
    vertex: int
    corner: int
    squares: Tuple[int, int, int, int]
    labels: Tuple[int, int, int, int]  # p1, q1, p2, q2


def enumerate_grids(H: HigmanGroup, ball: Ball) -> List[Grid2x2]:
    """4-cycles in the links of ball vertices, read from the type-i edge of C1."""
    labels = ball.labels()
    grids = []
    for v, sqs in sorted(ball.squares_at_vertex().items()):
        i = ball.vertices[v][1]
        j = (i + 1) % 4
        by_pair = {}
        for s in sqs:
            by_pair[(ball.square_edge[(s, i)], ball.square_edge[(s, j)])] = s
        ei = sorted({p[0] for p in by_pair})
        ej = sorted({p[1] for p in by_pair})
        for e1, e2 in combinations(ei, 2):
            for f1, f2 in combinations(ej, 2):
                quad = [by_pair.get(k) for k in ((e1, f1), (e2, f1), (e2, f2), (e1, f2))]
                if None in quad:
                    continue
                c1, c2, c3, c4 = quad
                # c1 -e1/f1- ; c1->c2 shares f1 (type j), so start from c2->? re-read
                # so that the first step crosses a type-i edge
                cyc = (c1, c4, c3, c2)  # c1-c4 share e1 (type i), c4-c3 share f2, c3-c2 share e2, c2-c1 share f1
                labs = []
                for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                    lab = labels.get((a, b))
                    if lab is None:
                        lab = _label_by_oracle(H, ball, a, b)
                    labs.append(lab[1])
                grids.append(Grid2x2(v, i, cyc, tuple(labs)))
    return grids


def _label_by_oracle(H: HigmanGroup, ball: Ball, a: int, b: int) -> Tuple[int, int]:
    q = word_mul(word_inverse(ball.squares[a]), ball.squares[b])
    for g in range(4):
        n = H.edge_membership(q, g)
        if n:
            return g, n
    raise ValueError(f"squares {a} and {b} are not adjacent")


def classify_grid(m: int, grid: Grid2x2) -> List[str]:
    """Problems with a grid's labels (empty list when the label law holds)."""
    p1, q1, p2, q2 = grid.labels
    problems = []
    if p2 != -p1:
        problems.append(f"p2={p2} != -p1={-p1}")
    if Fraction(q2) != -Fraction(m) ** p1 * q1:
        problems.append(f"q2={q2} != -m^p1 q1")
    if not bs_eval(m, [("a", p1), ("b", q1), ("a", p2), ("b", q2)]).is_identity():
        problems.append("cyclic product of labels is not the identity")
    return problems


@dataclass
class NonCompleteWitness:
    corner: int
    squares: Tuple[HWord, HWord, HWord]
    link_path: Tuple[tuple, tuple, tuple, tuple]
    completion: Optional[Tuple[int, int]]


def check_link_not_complete(H: HigmanGroup, corner: int, base: HWord = ()) -> NonCompleteWitness:
    """Length-3 link path C, C a_i^-1, C a_i^-1 a_{i+1} with no closing square."""
    i = corner % 4
    j = (i + 1) % 4
    m = H.params[i]
    g1 = BSElem(m, 0, 0, 0)
    g2 = gen_a(m, -1)
    g3 = bs_mul(g2, gen_b(m, 1))
    path = (b_coset_key(g1), a_coset_key(g1), b_coset_key(g2), a_coset_key(g3))
    squares = (base, word_mul(base, ((i, -1),)), word_mul(base, ((i, -1), (j, 1))))
    return NonCompleteWitness(i, squares, path, link_completion(m, -1, 1))


def coset_pair_has_element(m: int, a_key: tuple, b_key: tuple) -> bool:
    """Is there an element in both x<a> and y<b>?  (A link edge between them.)"""
    _, num, mexp = a_key
    _, bnum, bmexp, k = b_key
    x = BSElem.make(m, (num, mexp), k)
    return b_coset_key(x) == b_key


# --- intersection graphs -----------------------------------------------------


@dataclass
class IntersectionReport:
    gamma_dist: List[Tuple[int, int, int]]  # (tail, head, type)
    gamma_extra: List[Tuple[int, int, HWord]]  # undistorted-undistorted pairs
    skeleton_edges: List[Tuple[int, int, int]]
    isomorphic: bool
    misclassified: List[tuple]
    distance_two_checked: int


def _distortion(x: BSElem) -> str:
    return "distorted" if x.k == 0 else "undistorted"


def build_intersection_graphs(
    H: HigmanGroup, ball: Ball, power_bound: Optional[int] = None, max_pairs: Optional[int] = None
) -> IntersectionReport:
    """Gamma / Gamma_dist on the vertices of the ball, decided algebraically.

    For a pair of vertex groups P1 = h1 P_i h1^-1, P2 = h2 P_j h2^-1 we look
    for a nontrivial element of P1 that also lies in P2 among conjugates
    ``s a_e^n s^-1`` with s a ball square at v1 and e a type at v1.  Each
    side then classifies the element by its BS coordinates: k = 0 means it
    sits in the distorted normal subgroup.
    """
    if power_bound is None:
        power_bound = max(H.params.m) ** 2
    at_vertex = ball.squares_at_vertex()
    skel = ball.skeleton()
    und = nx.Graph(skel)
    dist = dict(nx.all_pairs_shortest_path_length(und, cutoff=2))

    def intersect(v1: int, v2: int, powers: Iterable[int]):
        s2, c2 = ball.vertices[v2]
        h2 = ball.squares[s2]
        c1 = ball.vertices[v1][1]
        for s in at_vertex[v1]:
            h = ball.squares[s]
            for e in (c1, (c1 + 1) % 4):
                for n in powers:
                    x = word_mul(h, ((e, n),), word_inverse(h))
                    y = word_mul(word_inverse(h2), x, h2)
                    coords2 = H.vertex_coords(y, c2)
                    if coords2 is not None:
                        # e == c1 is the stable letter of P1's standard form
                        side1 = "undistorted" if e == c1 else "distorted"
                        return x, e, side1, _distortion(coords2)
        return None

    gamma_dist = []
    misclassified = []
    pairs = sorted({tuple(sorted((u, v))) for u, v in und.edges})
    for u, v in pairs:
        hit = intersect(u, v, [1])
        if hit is None:
            misclassified.append(("no-intersection", u, v))
            continue
        x, e, d1, d2 = hit
        if (d1 == "distorted") == (d2 == "distorted"):
            misclassified.append(("not-exactly-one-distorted", u, v, d1, d2))
            continue
        head = u if d1 == "undistorted" else v
        tail = v if head == u else u
        gamma_dist.append((tail, head, e))

    extra = []
    checked = 0
    two = sorted(
        (u, v) for u in dist for v, d in dist[u].items() if d == 2 and u < v
    )
    if max_pairs is not None:
        two = two[:max_pairs]
    for u, v in two:
        checked += 1
        hit = intersect(u, v, range(1, power_bound + 1))
        if hit is None:
            continue
        x, e, d1, d2 = hit
        if d1 == "undistorted" and d2 == "undistorted":
            extra.append((u, v, x))
        else:
            misclassified.append(("distance-two-dist-edge", u, v, d1, d2))

    skeleton_edges = sorted((t, h, d["type"]) for t, h, d in skel.edges(data=True))
    g1 = nx.MultiDiGraph()
    g1.add_nodes_from(range(len(ball.vertices)))
    for t, h, e in gamma_dist:
        g1.add_edge(t, h, type=e)
    iso = sorted(gamma_dist) == skeleton_edges and nx.is_isomorphic(
        g1, skel, edge_match=lambda a, b: sorted(d["type"] for d in a.values()) == sorted(d["type"] for d in b.values())
    )
    return IntersectionReport(sorted(gamma_dist), extra, skeleton_edges, iso, misclassified, checked)


def special_intersection_example(H: HigmanGroup, i: int = 0) -> Tuple[HWord, str, str]:
    """<a_i, a_{i+1}> against a_{i-1} <a_i, a_{i+1}> a_{i-1}^-1.

    They share a_i^{m_{i-1}} = a_{i-1} a_i a_{i-1}^-1, stable in both.
    """
    k = (i - 1) % 4
    x = word_mul(((k, 1), (i, 1), (k, -1)))
    c1 = H.vertex_coords(x, i)
    c2 = H.vertex_coords(word_mul(((k, -1),), x, ((k, 1),)), i)
    return x, _distortion(c1), _distortion(c2)


# --- export ------------------------------------------------------------------


def ball_to_dot(ball: Ball) -> str:
    lines = ["digraph ball {"]
    for k, w in enumerate(ball.squares):
        lines.append(f'  s{k} [label="{format_word(w) or "1"}"];')
    for a, b, g, n in ball.dual_edges:
        if a < b:
            lines.append(f'  s{a} -> s{b} [label="a{g}^{n}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def skeleton_to_dot(ball: Ball) -> str:
    lines = ["digraph skeleton {"]
    for k, (s, c) in enumerate(ball.vertices):
        lines.append(f'  v{k} [label="v{c}{(c + 1) % 4}@s{s}"];')
    for e in range(len(ball.edges)):
        lines.append(f'  v{ball.edge_tail(e)} -> v{ball.edge_head(e)} [label="e{ball.edges[e][1]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def link_to_dot(link: LinkGraph) -> str:
    def name(node):
        return "_".join(str(x).replace("-", "m") for x in node)

    lines = ["graph link {"]
    for node in sorted(link.graph.nodes, key=str):
        lines.append(f'  {name(node)} [label="{node[0]}{node[1:]}"];')
    for u, v in sorted(link.graph.edges, key=str):
        lines.append(f"  {name(u)} -- {name(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export(obj, fmt: str = "json") -> str:
    if isinstance(obj, Ball):
        if fmt == "json":
            return json.dumps(obj.to_json(), sort_keys=True)
        if fmt == "dot":
            return ball_to_dot(obj)
    if isinstance(obj, LinkGraph):
        if fmt == "dot":
            return link_to_dot(obj)
        if fmt == "json":
            return json.dumps(
                {
                    "corner": obj.corner,
                    "m": obj.m,
                    "truncation": obj.truncation,
                    "nodes": sorted([list(n) for n in obj.graph.nodes], key=str),
                    "edges": sorted([[list(u), list(v)] for u, v in obj.graph.edges], key=str),
                },
                sort_keys=True,
            )
    if isinstance(obj, IntersectionReport) and fmt == "json":
        return json.dumps(
            {
                "gamma_dist": obj.gamma_dist,
                "gamma_extra": [[u, v, format_word(x)] for u, v, x in obj.gamma_extra],
                "isomorphic": obj.isomorphic,
                "misclassified": [list(map(str, m)) for m in obj.misclassified],
            },
            sort_keys=True,
        )
    raise ValueError(f"cannot export {type(obj).__name__} as {fmt}")


def import_ball(text: str) -> Ball:
    return Ball.from_json(json.loads(text))
