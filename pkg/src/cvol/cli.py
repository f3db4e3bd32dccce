"""Command-line interface.

Exit codes: 0 when everything succeeded and every check passed, 1 when a
computation failed or a check did not pass, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

import numpy as np

from . import FIXTURES, fixture_path
from .develop import develop, edge_log_c
from .errors import CvolError
from .solver import all_equations, multiplicative_residuals, shapes_from_field, shapes_from_values, solve
from .triangulation import Triangulation, parse
from .volume import (
    INVARIANT_TOL,
    complex_volume,
    five_term_residuals,
    report_json,
    run_invariant_suite,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _read_text(path: str) -> str:
    if not os.path.exists(path) and path in FIXTURES:
        return fixture_path(path).read_text(encoding="utf-8")
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path: str) -> Triangulation:
    return parse(_read_text(path))


def _complex_list(data) -> list[complex]:
    if isinstance(data, dict):
        data = data.get("shapes", data.get("z"))
    if not isinstance(data, list):
        raise ValueError("expected a list of [re, im] pairs")
    out = []
    for item in data:
        if isinstance(item, dict):
            item = item["z"]
        out.append(complex(item[0], item[1]))
    return out


def _parse_root(text: str | None):
    if text is None:
        return None
    if "," not in text:
        return int(text)
    re_, im = text.split(",", 1)
    return complex(float(re_), float(im))


def _parse_base(text: str | None):
    if text is None:
        return None
    parts = [int(x) for x in text.split(",")]
    if len(parts) != 3:
        raise ValueError("--base expects T,V,S")
    return tuple(parts)


def _shapes(args, t: Triangulation):
    if getattr(args, "field", False):
        return shapes_from_field(t, root=_parse_root(getattr(args, "root", None)))
    shapes_file = getattr(args, "shapes_file", None)
    if shapes_file:
        with open(shapes_file, encoding="utf-8") as fh:
            return shapes_from_values(t, _complex_list(json.load(fh)))
    seed_file = getattr(args, "seed_file", None)
    if seed_file:
        with open(seed_file, encoding="utf-8") as fh:
            return solve(t, seed=_complex_list(json.load(fh)))
    return solve(t, seed=t.shapes)


def _fmt(z: complex) -> str:
    return f"{z.real:+.15f} {z.imag:+.15f}i"


def cmd_validate(args) -> int:
    t = _load(args.file)
    print(f"tetrahedra: {t.n_tetrahedra}")
    print(f"edge classes: {len(t.edge_classes)} (valences {[e.valence for e in t.edge_classes]})")
    for c in t.cusps:
        print(f"cusp {c.index}: {len(c.triangles)} triangles, euler characteristic {c.euler_characteristic}")
    print("ordering: ok")
    print("orientation: ok")
    return EXIT_OK


def cmd_solve(args) -> int:
    t = _load(args.file)
    s = _shapes(args, t)
    res = multiplicative_residuals(all_equations(t), s.z)
    if args.json:
        print(json.dumps({"shapes": [[z.real, z.imag] for z in s.z], "residuals": res, "method": s.method}))
    else:
        for i, z in enumerate(s.z):
            print(f"z{i} = {_fmt(z)}")
        print(f"max residual: {max(res, default=0.0):.3e} ({s.method}, {s.iterations} iterations)")
    return EXIT_OK


def cmd_develop(args) -> int:
    t = _load(args.file)
    s = _shapes(args, t)
    dec = develop(t, s.z, _parse_base(args.base))
    lc = edge_log_c(t, dec)
    for cusp, base in sorted(dec.bases.items()):
        print(f"cusp {cusp}: base (tet, vertex, side) = {base}")
    print(f"holonomy residual: {dec.holonomy_residual:.3e}")
    for x in lc:
        print(f"edge {x.edge_class}: c = {_fmt(x.c)}  Log c = {_fmt(x.log_c)}")
    if args.dump_cusp:
        with open(args.dump_cusp, "w", encoding="utf-8") as fh:
            json.dump({"bases": {str(k): v for k, v in dec.bases.items()}, "triangles": dec.to_json()}, fh, indent=1)
        print(f"wrote {args.dump_cusp}")
    return EXIT_OK


def cmd_cvol(args) -> int:
    t = _load(args.file)
    s = _shapes(args, t)
    result = complex_volume(t, s.z, _parse_base(args.base))
    v = result.volume
    if args.json:
        print(json.dumps(result.to_json()))
        return EXIT_OK
    print(f"Vol          = {v.vol:.15f}")
    print(f"CS           = {v.cs:.15f}  (mod pi^2)")
    print(f"CS/(2 pi^2)  = {v.cs_normalized:.15f}  (mod 1/2)")
    print("flattenings:")
    for eps, f in zip(t.orientation_signs, result.flattenings):
        print(f"  {'+' if eps > 0 else '-'}[{_fmt(f.z)}; {f.p}, {f.q}]")
    return EXIT_OK


def cmd_check(args) -> int:
    text = _read_text(args.file)
    shapes = None
    if args.field or args.shapes_file:
        shapes = _shapes(args, parse(text)).z
    report = run_invariant_suite(json.loads(text), shapes, rng_seed=args.rng_seed)
    if args.json:
        print(report_json(report))
    else:
        for c in report.checks:
            status = "skip" if c.passed is None else ("pass" if c.passed else "FAIL")
            res = "" if c.residual is None else f"  residual {c.residual:.3e}"
            print(f"{status:4}  {c.name}{res}  {c.detail}".rstrip())
        print("all checks passed" if report.passed else "some checks FAILED")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_fiveterm(args) -> int:
    rng = np.random.default_rng(args.rng_seed)
    worst_ten = worst_sum = 0.0
    for _ in range(args.samples):
        a, b = five_term_residuals(rng)
        worst_ten, worst_sum = max(worst_ten, a), max(worst_sum, b)
    ok = worst_ten < INVARIANT_TOL and worst_sum < INVARIANT_TOL
    print(f"samples: {args.samples}  rng seed: {args.rng_seed}")
    print(f"worst ten-equation residual: {worst_ten:.3e}")
    print(f"worst distance of the L-hat sum from pi^2 Z: {worst_sum:.3e}")
    print("pass" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def _add_shape_source(p: argparse.ArgumentParser, seed: bool = False) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--field", action="store_true", help="evaluate shapes from the file's shape_field")
    g.add_argument("--shapes-file", metavar="F", help="JSON list of [re, im] shapes")
    if seed:
        g.add_argument("--seed-file", metavar="F", help="JSON list of [re, im] Newton seeds")
    p.add_argument("--root", help="with --field: root approximation RE,IM or root index")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvol",
        description="Complex volume (Vol + i CS) from an ordered ideal triangulation.",
        epilog=f"FILE may also be a bundled fixture name: {', '.join(FIXTURES)}.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and check structure, ordering and orientation")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="solve the gluing equations for shapes")
    p.add_argument("file")
    _add_shape_source(p, seed=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("develop", help="develop the cusps and print long-edge labels")
    p.add_argument("file")
    _add_shape_source(p)
    p.add_argument("--dump-cusp", metavar="OUT", help="write the developed triangles as JSON")
    p.add_argument("--base", metavar="T,V,S", help="base side: tetrahedron, vertex, side index")
    p.set_defaults(func=cmd_develop)

    p = sub.add_parser("cvol", help="compute the complex volume")
    p.add_argument("file")
    _add_shape_source(p)
    p.add_argument("--base", metavar="T,V,S", help="base side for the cusp development")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cvol)

    p = sub.add_parser("check", help="run the full invariant suite")
    p.add_argument("file")
    _add_shape_source(p)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fiveterm", help="random five-term relation test")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--rng-seed", type=int, default=0)
    p.set_defaults(func=cmd_fiveterm)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CvolError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
