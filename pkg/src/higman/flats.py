"""Flats of X built from four quadrants of the square tiling of the plane.

A quadrant with base type i and sequences (k_n), (k'_n) has cells C_{l,m},
l, m >= 0.  The vertical line x = j + 1/2 has type i (j even) or i+2 (j
odd); the horizontal line y = j + 1/2 has type i+1 or i+3 likewise.  The two
axes are fixed by the sequences and every other cell is forced by the 2x2
grid law once its lower-left three neighbours are known.

Labels grow as iterated exponentials, so they are kept as exact ``Num``
values (plain ints, or hereditary base-m numbers when the four m_i agree).
Cell words are only materialized while their exponents stay small.

Labels are stored as ``labels[(c, d)] = (type, n)`` meaning ``d = c a_type^n``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .towers import Huge, Num, cmp_abs, max_abs, scale, sign
from .words import HigmanGroup, HWord, format_word, word_inverse, word_mul

Cell = Tuple[int, int]
Label = Tuple[int, Num]
WORD_EXP_LIMIT = 1 << 12


@dataclass(frozen=True)
class FlatSpec:
    base: int
    ks: Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]
    radius: int

    def __post_init__(self):
        if len(self.ks) != 4:
            raise ValueError("need four sequences")
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        for q, seq in enumerate(self.ks):
            if len(seq) < self.radius:
                raise ValueError(f"sequence k({q}) shorter than radius {self.radius}")
            if any(k < 1 for k in seq):
                raise ValueError(f"sequence k({q}) has a non-positive entry")
        object.__setattr__(self, "ks", tuple(tuple(s) for s in self.ks))
        object.__setattr__(self, "base", self.base % 4)

    @classmethod
    def constant(cls, radius: int, value: int = 1, base: int = 0) -> "FlatSpec":
        return cls(base, tuple((value,) * radius for _ in range(4)), radius)

    def with_entry(self, q: int, n: int, value: int) -> "FlatSpec":
        ks = [list(s) for s in self.ks]
        ks[q][n] = value
        return FlatSpec(self.base, tuple(tuple(s) for s in ks), self.radius)

    def to_json(self) -> dict:
        return {"base": self.base, "ks": [list(s) for s in self.ks], "radius": self.radius}

    @classmethod
    def from_json(cls, d: dict) -> "FlatSpec":
        return cls(d["base"], tuple(tuple(s) for s in d["ks"]), d["radius"])


def vertical_line_type(base: int, j: int) -> int:
    """Type of the line x = j + 1/2 in a quadrant with the given base."""
    return (base + (0 if j % 2 == 0 else 2)) % 4


def horizontal_line_type(base: int, j: int) -> int:
    return (base + (1 if j % 2 == 0 else 3)) % 4


def corner_stable(t1: int, t2: int) -> Tuple[int, int]:
    """(stable, normal) letters of the vertex where types t1 and t2 meet."""
    if (t2 - t1) % 4 == 1:
        return t1, t2
    if (t1 - t2) % 4 == 1:
        return t2, t1
    raise ValueError(f"types {t1} and {t2} do not meet at a vertex")


def _set_label(labels: Dict, c: Cell, d: Cell, lab: Label) -> None:
    labels[(c, d)] = lab
    labels[(d, c)] = (lab[0], -lab[1])


class FlatTooLarge(RuntimeError):
    pass


@dataclass
class Quadrant:
    base: int
    radius: int
    cells: Dict[Cell, Optional[HWord]] = field(default_factory=dict)
    labels: Dict[Tuple[Cell, Cell], Label] = field(default_factory=dict)
    provenance: Dict[Cell, str] = field(default_factory=dict)


def _extend_word(w: Optional[HWord], letters) -> Optional[HWord]:
    if w is None:
        return None
    for _, e in letters:
        if not isinstance(e, int) or abs(e) > WORD_EXP_LIMIT:
            return None
    return word_mul(w, tuple(letters))


def build_boundary(base: int, kh: Sequence[int], kv: Sequence[int], radius: int) -> Quadrant:
    """The two axes of one quadrant."""
    q = Quadrant(base % 4, radius)
    q.cells[(0, 0)] = ()
    q.provenance[(0, 0)] = "boundary"
    for n in range(1, radius + 1):
        t = vertical_line_type(base, n - 1)
        q.cells[(n, 0)] = word_mul(q.cells[(n - 1, 0)], ((t, -kh[n - 1]),))
        _set_label(q.labels, (n - 1, 0), (n, 0), (t, -kh[n - 1]))
        t = horizontal_line_type(base, n - 1)
        q.cells[(0, n)] = word_mul(q.cells[(0, n - 1)], ((t, -kv[n - 1]),))
        _set_label(q.labels, (0, n - 1), (0, n), (t, -kv[n - 1]))
        q.provenance[(n, 0)] = q.provenance[(0, n)] = "boundary"
    return q


def extension_step(params: Sequence[int], lab_a: Label, lab_b: Label):
    """Fourth square of a 2x2 grid from D, D a_th^p (right) and D a_tv^q (up).

    Returns (letters from D to the new square C, label C->right, label C->up).
    Both outward labels must be negative; the labels back from C are then
    positive.  If a_th is the stable letter at the corner,
    D a_th^p a_tv^(q m^|p|) = D a_tv^q a_th^p, and symmetrically otherwise.
    """
    (th, p), (tv, q) = lab_a, lab_b
    if sign(p) >= 0 or sign(q) >= 0:
        raise AssertionError(f"extension needs negative outward labels, got {p}, {q}")
    s, _ = corner_stable(th, tv)
    m = params[s]
    try:
        if s == th:
            up = scale(q, m, -p)
            return ((th, p), (tv, up)), (tv, -up), (th, -p)
        right = scale(p, m, -q)
        return ((tv, q), (th, right)), (tv, -q), (th, -right)
    except ValueError as exc:
        raise FlatTooLarge(f"label arithmetic needs one base: {exc}") from None


def extend(H: HigmanGroup, q: Quadrant) -> Quadrant:
    """Fill the quadrant row by row from its axes."""
    R = q.radius
    for y in range(1, R + 1):
        for x in range(1, R + 1):
            d = (x - 1, y - 1)
            a, b, c = (x, y - 1), (x - 1, y), (x, y)
            letters, to_a, to_b = extension_step(H.params.m, q.labels[(d, a)], q.labels[(d, b)])
            if sign(to_a[1]) <= 0 or sign(to_b[1]) <= 0:
                raise AssertionError(f"positivity lost at {c}")
            q.cells[c] = _extend_word(q.cells[d], letters)
            _set_label(q.labels, c, a, to_a)
            _set_label(q.labels, c, b, to_b)
            q.provenance[c] = "extension"
    return q


def rotate(q: int, cell: Cell) -> Cell:
    """Quadrant-local coordinates to the plane, rotating by q quarter turns."""
    x, y = cell
    for _ in range(q % 4):
        x, y = -y, x
    return x, y


@dataclass
class FlatPatch:
    spec: FlatSpec
    params: Tuple[int, int, int, int]
    cells: Dict[Cell, Optional[HWord]]
    labels: Dict[Tuple[Cell, Cell], Label]
    provenance: Dict[Cell, str]
    quadrant_cells: List[Dict[Cell, Optional[HWord]]]
    quadrant_labels: List[Dict[Tuple[Cell, Cell], Label]]

    @property
    def radius(self) -> int:
        return self.spec.radius

    def interior_vertices(self) -> List[Cell]:
        """Lower-left cells of every 2x2 block; the vertex is its upper-right corner."""
        R = self.radius
        return [(x, y) for y in range(-R, R) for x in range(-R, R)]

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "params": list(self.params),
            "cells": [
                {"x": x, "y": y, "word": None if w is None else format_word(w), "provenance": self.provenance[(x, y)]}
                for (x, y), w in sorted(self.cells.items())
            ],
            "labels": [
                {"from": list(c), "to": list(d), "gen": g, "exp": n if isinstance(n, int) else str(n)}
                for (c, d), (g, n) in sorted(self.labels.items())
            ],
        }

    def to_dot(self) -> str:
        name = lambda c: f"c{c[0]}_{c[1]}".replace("-", "m")
        lines = ["digraph flat {"]
        for c, w in sorted(self.cells.items()):
            text = "?" if w is None else (format_word(w) or "1")
            lines.append(f'  {name(c)} [label="{text}", pos="{c[0]},{c[1]}!"];')
        for (c, d), (g, n) in sorted(self.labels.items()):
            if c < d:
                lines.append(f'  {name(c)} -> {name(d)} [label="a{g}^{n}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_quadrant(H: HigmanGroup, spec: FlatSpec, q: int) -> Quadrant:
    base = (spec.base + q) % 4
    quad = build_boundary(base, spec.ks[q], spec.ks[(q + 1) % 4], spec.radius)
    return extend(H, quad)


def glue(H: HigmanGroup, spec: FlatSpec) -> FlatPatch:
    """Four quadrants, the q-th turned by q quarter turns, glued along axes.

    The vertical axis of quadrant q and the horizontal axis of quadrant q+1
    both use k(q+1); they land on the same cells of the plane.
    """
    cells: Dict[Cell, Optional[HWord]] = {}
    labels: Dict[Tuple[Cell, Cell], Label] = {}
    prov: Dict[Cell, str] = {}
    per_quadrant, per_quadrant_labels = [], []
    for q in range(4):
        quad = build_quadrant(H, spec, q)
        mine = {}
        mine_labels = {}
        for c, w in quad.cells.items():
            g = rotate(q, c)
            mine[g] = w
            if g in cells:
                if cells[g] is not None and w is not None and not H.equal(cells[g], w):
                    raise AssertionError(f"quadrants disagree on cell {g}")
            else:
                cells[g] = w
                prov[g] = quad.provenance[c]
        for (c, d), lab in quad.labels.items():
            key = (rotate(q, c), rotate(q, d))
            if key in labels and labels[key] != lab:
                raise AssertionError(f"quadrants disagree on label {key}")
            labels[key] = lab
            mine_labels[key] = lab
        per_quadrant.append(mine)
        per_quadrant_labels.append(mine_labels)
    return FlatPatch(spec, H.params.m, cells, labels, prov, per_quadrant, per_quadrant_labels)


def grid_types(patch: FlatPatch) -> Dict[Tuple[str, int], int]:
    """Type of every vertical ('x', j) and horizontal ('y', j) line x/y = j + 1/2."""
    out: Dict[Tuple[str, int], int] = {}
    for ((x1, y1), (x2, y2)), (g, _) in patch.labels.items():
        key = ("x", min(x1, x2)) if y1 == y2 else ("y", min(y1, y2))
        if out.setdefault(key, g) != g:
            raise AssertionError(f"line {key} carries two types")
    return out


@dataclass
class IsometryReport:
    checked: int
    violations: List[Tuple[Cell, str]]
    cross_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def _block(v: Cell) -> Tuple[Cell, Cell, Cell, Cell]:
    x, y = v
    return (x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)


def check_block(params: Sequence[int], patch: "FlatPatch", v: Cell) -> Optional[str]:
    """Problem with the 2x2 block whose lower-left cell is v, or None.

    Around the vertex the four cells are g0 = 1, g1 = s^p1, g2 = g1 n^q1,
    g3 = g2 s^p2 in the vertex group BS(1, m) with stable letter s, and
    g3 n^q2 = 1.  The cells are pairwise distinct and the two edges of each
    type differ exactly when all four labels are nonzero, and the cycle
    closes exactly when p2 = -p1 and q2 = -m^p1 q1.  A 4-cycle in a
    bipartite link has no chords, so this is the whole link condition.
    """
    blk = _block(v)
    labs = []
    for a, b in zip(blk, blk[1:] + blk[:1]):
        lab = patch.labels.get((a, b))
        if lab is None:
            return "missing label"
        labs.append(lab)
    types = [t for t, _ in labs]
    if types[0] != types[2] or types[1] != types[3]:
        return "opposite edges have different types"
    try:
        s, _ = corner_stable(types[0], types[1])
    except ValueError:
        return "edge types do not meet at a vertex"
    if any(sign(n) == 0 for _, n in labs):
        return "zero label"
    if types[0] != s:
        labs = labs[1:] + labs[:1]
    (_, p1), (_, q1), (_, p2), (_, q2) = labs
    m = params[s]
    if cmp_abs(p1, p2) != 0 or sign(p1) != -sign(p2):
        return "p2 != -p1"
    try:
        if sign(p1) > 0:
            closes = q2 == -scale(q1, m, p1)
        else:
            closes = q1 == -scale(q2, m, -p1)
    except ValueError:
        return "labels use mixed bases"
    return None if closes else "q2 != -m^p1 q1"


def verify_local_isometry(H: HigmanGroup, patch: "FlatPatch", cross_check: bool = True) -> IsometryReport:
    """Check the link condition at every interior vertex of the patch.

    With ``cross_check`` the cell words are also compared against the labels
    with the word problem oracle, wherever words were materialized.
    """
    violations = []
    verts = patch.interior_vertices()
    for v in verts:
        problem = check_block(H.params.m, patch, v)
        if problem:
            violations.append((v, problem))
    crossed = 0
    if cross_check:
        for (c, d), (g, n) in sorted(patch.labels.items(), key=lambda kv: kv[0]):
            wc, wd = patch.cells.get(c), patch.cells.get(d)
            if c < d and wc is not None and wd is not None and isinstance(n, int):
                crossed += 1
                if not H.equal(word_mul(wc, ((g, n),)), wd):
                    violations.append((c, f"cell {d} is not cell {c} times a{g}^{n}"))
        # distinct materialized cells around each vertex
        for v in verts:
            ws = [patch.cells.get(c) for c in _block(v)]
            if None not in ws and any(H.equal(a, b) for a, b in combinations(ws, 2)):
                violations.append((v, "squares not distinct"))
    return IsometryReport(len(verts), violations, crossed)


def label_growth(patch: FlatPatch) -> Dict[int, Num]:
    """Max |n| over dual edges with both ends within sup-radius rho."""
    out = {}
    for rho in range(patch.radius + 1):
        out[rho] = max_abs(
            n for (c, d), (_, n) in patch.labels.items() if max(map(abs, c + d)) <= rho
        )
    return out


def strictly_increasing(table: Dict[int, Num], start: int = 2) -> bool:
    keys = sorted(k for k in table if k >= start)
    return all(cmp_abs(table[a], table[b]) < 0 for a, b in zip(keys, keys[1:]))


def diagonal_words(base: int, n: int) -> HWord:
    """(a_i^-1 a_{i+2}^-1)^n."""
    return word_mul(*([((base, -1), ((base + 2) % 4, -1))] * n)) if n else ()


def quadrant_agreement(H: HigmanGroup, p1: FlatPatch, p2: FlatPatch) -> List[str]:
    """'agree', 'differ' or 'unknown' for each quadrant of two patches.

    Identical labels give identical cells (every cell is C0 times the labels
    along a path).  'differ' needs a materialized cell that is not h_equal.
    """
    out = []
    for q in range(4):
        if p1.quadrant_labels[q] == p2.quadrant_labels[q]:
            out.append("agree")
            continue
        c1, c2 = p1.quadrant_cells[q], p2.quadrant_cells[q]
        differs = any(
            c1[c] is not None and c2.get(c) is not None and not H.equal(c1[c], c2[c]) for c in sorted(c1)
        )
        out.append("differ" if differs else "unknown")
    return out


def patch_to_json(patch: FlatPatch) -> str:
    return json.dumps(patch.to_json(), sort_keys=True)
