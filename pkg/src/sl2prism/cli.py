"""Command line interface: ``sl2prism {solve,table,mesh,verify}``.

Exit codes: 0 ok, 1 usage, 2 inadmissible parameters, 3 I/O error,
4 verification failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import verify as verify_suites
from .exceptions import GeometryError, InvalidParameter
from .export import export_patch
from .tiling import DEFAULT_PHI_RANGE, DEFAULT_SAMPLES, solve, vertex_angle_residual

EXIT_OK, EXIT_USAGE, EXIT_INADMISSIBLE, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sl2prism", description="Regular prism tilings of SL2R space.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_solve = sub.add_parser("solve", help="solve the vertex parameter x3")
    p_solve.add_argument("-p", type=int, required=True)
    p_solve.add_argument("-q", type=int, required=True)

    p_table = sub.add_parser("table", help="tabulate x3 for several q")
    p_table.add_argument("-p", type=int, required=True)
    p_table.add_argument("-q", type=int, nargs="*", default=[])
    p_table.add_argument("--json", type=Path, help="also write the rows as JSON")

    p_mesh = sub.add_parser("mesh", help="export a tiling patch as OBJ plus a JSON report")
    p_mesh.add_argument("-p", type=int, required=True)
    p_mesh.add_argument("-q", type=int, required=True)
    p_mesh.add_argument("--phi-tau", type=float, default=None, help="bounded prism height")
    p_mesh.add_argument("--depth", type=int, default=0)
    p_mesh.add_argument("--resolution", type=int, default=DEFAULT_SAMPLES)
    p_mesh.add_argument("--phi-range", type=float, nargs=2, default=list(DEFAULT_PHI_RANGE),
                        metavar=("LO", "HI"))
    p_mesh.add_argument("--out", type=Path, default=Path("tiling.obj"))
    p_mesh.add_argument("--json", type=Path, help="report path (default: OBJ path with .json)")

    p_verify = sub.add_parser("verify", help="run the self-check suites")
    p_verify.add_argument("level", nargs="?", choices=sorted(verify_suites.LEVELS), default="quick")
    p_verify.add_argument("--tol-override", type=float, default=None, help=argparse.SUPPRESS)
    return parser


def cmd_solve(args) -> int:
    spec = solve(args.p, args.q)
    print(f"x3 = {spec.x3:.8f}")
    print(f"residual = {vertex_angle_residual(spec.p, spec.q, spec.x3):.3e}")
    return EXIT_OK


def cmd_table(args) -> int:
    if not args.q:
        raise UsageError("table: error: at least one -q value is required")
    rows, ok = [], 0
    print(f"{'p':>3} {'q':>6} {'x3':>12}")
    for q in args.q:
        try:
            x3 = solve(args.p, q).x3
        except InvalidParameter as exc:
            rows.append({"p": args.p, "q": q, "x3": None, "error": "inadmissible"})
            print(f"{args.p:>3} {q:>6} {'inadmissible':>12}  {exc}")
            continue
        except GeometryError as exc:
            rows.append({"p": args.p, "q": q, "x3": None, "error": str(exc)})
            print(f"{args.p:>3} {q:>6} {'error':>12}  {exc}")
            continue
        ok += 1
        rows.append({"p": args.p, "q": q, "x3": x3, "error": None})
        print(f"{args.p:>3} {q:>6} {x3:12.8f}")
    if args.json is not None:
        args.json.write_text(json.dumps({"rows": rows}, indent=2) + "\n")
    return EXIT_OK if ok else EXIT_INADMISSIBLE


def cmd_mesh(args) -> int:
    if args.resolution < 2:
        raise UsageError("mesh: error: --resolution must be at least 2")
    if args.depth < 0:
        raise UsageError("mesh: error: --depth must be non-negative")
    spec = solve(args.p, args.q, args.phi_tau)
    json_path = args.json or args.out.with_suffix(".json")
    mesh, report = export_patch(
        spec, args.depth, args.resolution, tuple(args.phi_range), args.out, json_path
    )
    print(f"wrote {args.out} ({len(mesh.objects)} tiles, {len(mesh.vertices)} vertices, "
          f"{len(mesh.faces)} faces) and {json_path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify_suites.run(args.level, args.tol_override)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: max residual {r.max_residual:.3e} (tol {r.tol:.1e})")
        for line in r.lines:
            print(f"       {line}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {"solve": cmd_solve, "table": cmd_table, "mesh": cmd_mesh, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameter as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
