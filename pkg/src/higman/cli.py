"""Command-line driver: ``higman <command> [options]``.

Exit status is 0 for an affirmative result, 1 for a negative one and 2 for
usage or resource errors.  Diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Dict, List, Optional, Tuple

from .action import PreconditionError, ShapeError, acylindricity_audit, classify, fixed_set, free_certificate
from .complex import (
    ResourceLimitError,
    build_ball,
    build_intersection_graphs,
    check_link_not_complete,
    classify_grid,
    dedup_violations,
    enumerate_grids,
    export,
    link_graph,
    skeleton_to_dot,
)
from .diagrams import (
    DiscDiagram,
    FillLimitError,
    Square,
    VerificationError,
    diagram_to_dot,
    fill_bounded,
    gauss_bonnet,
    is_reduced,
)
from .flats import FlatSpec, FlatTooLarge, glue, label_growth, strictly_increasing, verify_local_isometry
from .morphisms import HOM, automorphism_decompose, exponent_probe, hom_check, probe_grid
from .towers import describe
from .words import HElem, HigmanGroup, format_word, parse_word

DEFAULTS = {"m": (2, 2, 2, 2), "N": 3, "r": 2, "cap": 50_000, "format": "json", "seed": 0}
FORMATS = ("json", "dot", "text")


class UsageError(ValueError):
    pass


# --- configuration -----------------------------------------------------------


def read_config(path: str) -> Dict[str, object]:
    """key=value lines; '#' starts a comment."""
    out: Dict[str, object] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key == "m":
                out["m"] = tuple(int(x) for x in value.replace(",", " ").split())
            elif key in ("N", "r", "cap", "seed"):
                out[key] = int(value)
            elif key == "format":
                out["format"] = value
            else:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
    return out


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the config file, then from defaults.  Flags win."""
    config = read_config(args.config) if args.config else {}
    defaults = dict(DEFAULTS, format=getattr(args, "default_format", DEFAULTS["format"]))
    for key, default in defaults.items():
        if getattr(args, key) is None:
            setattr(args, key, config.get(key, default))
    args.m = tuple(args.m)
    if len(args.m) != 4 or any(x < 2 for x in args.m):
        raise UsageError("need four parameters m_i >= 2")
    if args.format not in FORMATS:
        raise UsageError(f"unknown format {args.format!r}")
    for key in ("N", "cap"):
        if getattr(args, key) < 1:
            raise UsageError(f"{key} must be positive")
    if args.r < 0:
        raise UsageError("radius must be >= 0")
    return args


def word(text: str):
    try:
        return parse_word(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --- output ------------------------------------------------------------------


def emit(args, report: dict, dot: Optional[str] = None) -> None:
    if args.format == "dot":
        if dot is None:
            raise UsageError(f"{args.command} has no DOT output")
        sys.stdout.write(dot)
    elif args.format == "text":
        for key, value in report.items():
            print(f"{key}: {value if not isinstance(value, (list, dict)) else json.dumps(value, sort_keys=True)}")
    else:
        print(json.dumps(report, sort_keys=True))


def helem_json(e: HElem) -> dict:
    return {
        "shape": list(e.shape),
        "blocks": [
            {"side": side, "syllables": [{"factor": f, "elem": x.to_json()} for f, x in t.syllables]}
            for side, t in e.blocks
        ],
        "fword": format_word(e.fword),
    }


# --- commands ----------------------------------------------------------------


def cmd_wp(args, H) -> int:
    trivial = H.is_trivial(word(args.word))
    if args.format == "text":
        print("trivial" if trivial else "nontrivial")
    else:
        emit(args, {"word": args.word, "trivial": trivial})
    return 0 if trivial else 1


def cmd_nf(args, H) -> int:
    emit(args, helem_json(H.reduce(word(args.word))))
    return 0


def cmd_ball(args, H) -> int:
    ball = build_ball(H, args.r, args.N, args.cap)
    if args.export:
        sys.stdout.write(export(ball, args.export) + ("\n" if args.export == "json" else ""))
        return 0
    dups = dedup_violations(H, ball)
    report = {
        "params": list(H.params.m), "radius": args.r, "truncation": args.N,
        "squares": len(ball.squares), "vertices": len(ball.vertices), "edges": len(ball.edges),
        "dedup_violations": [list(map(str, d)) for d in dups],
    }
    emit(args, report, skeleton_to_dot(ball))
    return 0 if not dups else 1


def cmd_link(args, H) -> int:
    lg = link_graph(H, args.vertex, args.N)
    girth = lg.girth
    witness = check_link_not_complete(H, args.vertex)
    report = {
        "corner": lg.corner, "m": lg.m, "truncation": lg.truncation,
        "nodes": lg.graph.number_of_nodes(), "edges": lg.graph.number_of_edges(),
        "bipartite": lg.is_bipartite(), "simple": lg.is_simple(),
        "girth": None if girth == float("inf") else int(girth),
        "non_complete_witness": {
            "squares": [format_word(w) for w in witness.squares],
            "closing_square": witness.completion,
        },
    }
    ok = lg.is_bipartite() and lg.is_simple() and girth >= 4 and witness.completion is None
    emit(args, report, export(lg, "dot"))
    return 0 if ok else 1


def cmd_grids(args, H) -> int:
    ball = build_ball(H, args.r, args.N, args.cap)
    grids = enumerate_grids(H, ball)
    bad = []
    for g in grids:
        problems = classify_grid(H.params[g.corner], g)
        if problems:
            bad.append({"vertex": g.vertex, "squares": list(g.squares), "labels": list(g.labels), "problems": problems})
    emit(args, {"grids": len(grids), "violations": bad})
    return 0 if not bad else 1


def cmd_gamma(args, H) -> int:
    ball = build_ball(H, args.r, args.N, args.cap)
    rep = build_intersection_graphs(H, ball, max_pairs=args.max_pairs)
    report = json.loads(export(rep, "json"))
    report["distance_two_checked"] = rep.distance_two_checked
    emit(args, report)
    return 0 if rep.isomorphic and not rep.misclassified else 1


def flat_spec(args) -> FlatSpec:
    if args.spec:
        with open(args.spec) as fh:
            return FlatSpec.from_json(json.load(fh))
    seq = tuple(args.seq) if args.seq else (1,) * args.radius
    ks = tuple(seq for _ in range(4))
    for q, override in enumerate((args.k0, args.k1, args.k2, args.k3)):
        if override:
            ks = ks[:q] + (tuple(override),) + ks[q + 1:]
    return FlatSpec(args.base, ks, args.radius)


def cmd_flat(args, H) -> int:
    patch = glue(H, flat_spec(args))
    if args.export == "json":
        print(json.dumps(patch.to_json(), sort_keys=True))
        return 0
    iso = verify_local_isometry(H, patch)
    growth = label_growth(patch)
    report = {
        "spec": patch.spec.to_json(),
        "interior_vertices": iso.checked,
        "cross_checked_labels": iso.cross_checked,
        "violations": [[list(v), p] for v, p in iso.violations],
        "label_growth": {str(k): describe(v) for k, v in sorted(growth.items())},
        "growth_strictly_increasing": strictly_increasing(growth),
    }
    emit(args, report, patch.to_dot())
    return 0 if iso.ok else 1


def load_diagram(path: str) -> DiscDiagram:
    with open(path) as fh:
        data = json.load(fh)
    squares = [
        Square(tuple(sq["corners"]), None if sq.get("image") is None else word(sq["image"]), k)
        for k, sq in enumerate(data["squares"])
    ]
    return DiscDiagram(squares)


def curvature_json(D: DiscDiagram, H=None) -> Tuple[dict, bool]:
    try:
        rep = gauss_bonnet(D)
    except VerificationError as exc:
        return {"gauss_bonnet": False, "error": str(exc)}, False
    out = rep.to_json()
    out.update({"gauss_bonnet": True, "interior_max": rep.interior_max, "squares": len(D.squares),
                "reduced": is_reduced(D, H)})
    return out, rep.interior_max <= 0


def cmd_diagram(args, H) -> int:
    if args.action == "fill":
        D = fill_bounded(H, word(args.target), args.max_squares, args.max_length)
        if D is None:
            emit(args, {"word": args.target, "filled": False})
            return 1
        report, ok = curvature_json(D, H)
        report = {"word": args.target, "filled": True, "diagram": D.to_json(), **report}
    else:
        D = load_diagram(args.target)
        report, ok = curvature_json(D, H)
    emit(args, report, diagram_to_dot(D))
    return 0 if ok else 1


def cmd_classify(args, H) -> int:
    ball = build_ball(H, args.r, args.N, args.cap)
    cls = classify(H, word(args.word), ball)
    emit(args, cls.to_json())
    return 0 if cls.kind != "unknown" else 1


def cmd_fixset(args, H) -> int:
    ball = build_ball(H, args.r, args.N, args.cap)
    fs = fixed_set(H, word(args.word), ball)
    emit(args, fs.to_json())
    return 0 if not fs.is_empty() else 1


def cmd_acyl(args, H) -> int:
    ball = build_ball(H, args.r, args.N, args.cap)
    rep = acylindricity_audit(H, ball, args.spot_checks, args.max_exp, args.seed)
    emit(args, {"paths_checked": rep.paths_checked, "spot_checks": rep.spot_checks,
                "violations": [list(map(str, v)) for v in rep.violations]})
    return 0 if rep.ok else 1


def cmd_freecert(args, H) -> int:
    ball = build_ball(H, args.r, args.N, args.cap)
    fc = free_certificate(H, word(args.a), word(args.b), args.k, args.l, args.L, ball)
    emit(args, fc.to_json())
    return 0 if fc.ok else 1


def cmd_hom(args, H) -> int:
    res = hom_check(H, tuple(word(w) for w in args.images))
    if args.format == "text":
        print(res.status)
    else:
        emit(args, res.to_json())
    return 0 if res.status == HOM else 1


def cmd_probe(args, H) -> int:
    if args.exponents:
        res = exponent_probe(H, args.exponents)
        emit(args, res.to_json())
        return 0 if res.status == HOM else 1
    results = probe_grid(H, args.range)
    homs = [list(r.exponents) for r in results if r.status == HOM]
    emit(args, {"range": args.range, "probed": len(results), "hom": homs})
    return 0 if homs == [[1, 1, 1, 1]] else 1


def cmd_decompose(args, H) -> int:
    found = automorphism_decompose(H, tuple(word(w) for w in args.images), args.R)
    if found is None:
        emit(args, {"found": False})
        return 1
    k, g = found
    emit(args, {"found": True, "shift": k, "conjugator": format_word(g)})
    return 0


# --- parser ------------------------------------------------------------------


def common_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--m", type=int, nargs=4, metavar="M", help="parameters m0..m3 (default 2 2 2 2)")
    p.add_argument("-N", type=int, help="exponent truncation (default 3)")
    p.add_argument("-r", type=int, help="ball radius (default 2)")
    p.add_argument("--cap", type=int, help="maximum number of ball squares")
    p.add_argument("--format", choices=FORMATS, help="output format (default json)")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--config", help="file of key=value defaults; flags win")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = common_options()
    parser = argparse.ArgumentParser(prog="higman", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("wp", cmd_wp, "decide whether a word is trivial")
    p.add_argument("word")
    p.set_defaults(default_format="text")
    add("nf", cmd_nf, "reduced block decomposition").add_argument("word")
    add("ball", cmd_ball, "build a ball of the complex and audit it").add_argument(
        "--export", choices=("json", "dot"))
    add("link", cmd_link, "link of a vertex of the fundamental square").add_argument(
        "-v", "--vertex", type=int, default=0, help="corner i, i.e. the (i, i+1) vertex")
    add("grids", cmd_grids, "enumerate 2x2 grids and check the label law")
    add("gamma", cmd_gamma, "intersection graphs versus the 1-skeleton").add_argument(
        "--max-pairs", type=int, default=None)

    p = add("flat", cmd_flat, "build a flat patch")
    p.add_argument("-i", "--base", type=int, default=0)
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--seq", type=int, nargs="+", help="k sequence for every quadrant")
    for q in range(4):
        p.add_argument(f"--k{q}", type=int, nargs="+", help=f"k sequence for quadrant {q}")
    p.add_argument("--spec", help="FlatSpec JSON file")
    p.add_argument("--export", choices=("json",))

    p = add("diagram", cmd_diagram, "fill a word or audit a diagram file")
    p.add_argument("action", choices=("fill", "audit"))
    p.add_argument("target", help="word for fill, JSON file for audit")
    p.add_argument("--max-squares", type=int, default=64)
    p.add_argument("--max-length", type=int, default=400)

    add("classify", cmd_classify, "elliptic / hyperbolic / unknown").add_argument("word")
    add("fixset", cmd_fixset, "fixed vertices and edges in a ball").add_argument("word")
    p = add("acyl", cmd_acyl, "weak acylindricity audit")
    p.add_argument("--spot-checks", type=int, default=200)
    p.add_argument("--max-exp", type=int, default=20)

    p = add("freecert", cmd_freecert, "free subgroup certificate")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("-k", type=int, default=1)
    p.add_argument("-l", type=int, default=1)
    p.add_argument("-L", type=int, default=6)

    p = add("hom", cmd_hom, "check a_i -> w_i against the relators")
    p.add_argument("images", nargs=4)
    p.set_defaults(default_format="text")
    p = add("probe-exponents", cmd_probe, "a_i -> a_i^n_i probes")
    p.add_argument("--range", type=int, default=3)
    p.add_argument("--exponents", type=int, nargs=4)
    p = add("decompose", cmd_decompose, "write an automorphism as conjugation after a shift")
    p.add_argument("images", nargs=4)
    p.add_argument("-R", type=int, default=3, help="maximum conjugator length")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = resolve(args)
        random.seed(args.seed)
        H = HigmanGroup(args.m)
        return args.func(args, H)
    except (UsageError, ResourceLimitError, FlatTooLarge, FillLimitError, PreconditionError,
            ShapeError, OSError, ValueError, KeyError) as exc:
        print(f"higman {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
