"""Command line interface.

Subcommands ``analyze``, ``solve``, ``verify`` and ``scan`` read a JSON
problem descriptor and print a JSON report on stdout.

Exit codes: 0 success, 1 input error, 2 verification above tolerance,
3 no compactly supported filters, 4 ambiguous rank decision,
5 degree cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from .decision import existence_check, frame_scan
from .estimator import as_generator, as_system
from .generators import ProblemError, SamplingProblem
from .leftinv import DegreeCapExceeded, NoPolynomialInverse
from .pencil import DEFAULT_TOL, RankAmbiguous
from .reconstruct import NoFilters, design_filters, verify_reconstruction
from .reduction import ReductionError

log = logging.getLogger("sisampling")

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_NONE, EXIT_AMBIGUOUS, EXIT_CAP = 0, 1, 2, 3, 4, 5
VERIFY_TOL = 1e-8


class InputError(Exception):
    pass


@dataclass
class Options:
    tol: float
    grid_size: int
    nu_max: int
    seed: int


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("schema.json").read_text())


def load_descriptor(path: str | Path) -> tuple[SamplingProblem, Options]:
    """Parse and validate a descriptor file."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read descriptor {path}: {exc}") from exc
    try:
        jsonschema.validate(doc, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise InputError(f"schema violation at {where}: {exc.message}") from exc
    if doc["s"] <= doc["r"]:
        raise InputError(f"schema violation: need s > r, got r={doc['r']}, s={doc['s']}")
    try:
        p = SamplingProblem(as_generator(doc["generator"]), as_system(doc.get("system")),
                            doc["r"], doc["s"])
    except (ProblemError, ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from exc
    o = doc.get("options", {})
    opts = Options(float(o.get("tol", DEFAULT_TOL)), int(o.get("gridSize", 256)),
                   int(o.get("nuMax", p.r * p.N)), int(o.get("seed", 0)))
    return p, opts


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def cmd_analyze(args) -> int:
    p, o = load_descriptor(args.file)
    rep = existence_check(p, tol=o.tol, grid_size=o.grid_size)
    print(_dump(rep.to_dict()))
    return EXIT_OK if rep.exists else EXIT_NONE


def cmd_solve(args) -> int:
    p, o = load_descriptor(args.file)
    rep = existence_check(p, tol=o.tol, oracle=False)
    if not rep.exists:
        print(_dump({"exists": False, "report": rep.to_dict()}))
        return EXIT_NONE
    design = design_filters(p, tol=o.tol, nu_max=o.nu_max, report=rep)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "filters.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["channel", "exponent", "coefficient"])
            for j, n, c in design.filters.rows():
                w.writerow([j, n, repr(c)])
        li = design.left_inverse.to_dict()
        li["method"] = design.method
        li["problem"] = {**p.to_dict(), "N": p.N}
        (out / "leftinverse.json").write_text(_dump(li) + "\n")
    except OSError as exc:
        raise InputError(f"cannot write to {out}: {exc}") from exc
    print(_dump({"exists": True, "nu": design.left_inverse.nu, "kappa": design.left_inverse.kappa,
                 "method": design.method, "residualNorm": design.left_inverse.residual_norm,
                 "files": ["filters.csv", "leftinverse.json"]}))
    return EXIT_OK


def cmd_verify(args) -> int:
    p, o = load_descriptor(args.file)
    if args.trials < 0:
        raise InputError("--trials must be nonnegative")
    if args.trials == 0:
        print(_dump({"maxError": 0.0, "trials": 0, "perTrial": []}))
        return EXIT_OK
    rep = verify_reconstruction(p, args.trials, seed=o.seed, tol=o.tol, nu_max=o.nu_max,
                                exact=args.exact)
    d = rep.to_dict()
    d["tolerance"] = VERIFY_TOL
    d["passed"] = rep.max_error < VERIFY_TOL
    print(_dump(d))
    return EXIT_OK if d["passed"] else EXIT_VERIFY


def cmd_scan(args) -> int:
    p, o = load_descriptor(args.file)
    print(_dump(frame_scan(p, o.grid_size, o.tol).to_dict()))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sisampling", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    a = sub.add_parser("analyze", help="decide existence of compactly supported filters")
    a.add_argument("file")
    a.set_defaults(func=cmd_analyze)
    s = sub.add_parser("solve", help="compute filters and a left inverse")
    s.add_argument("file")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_solve)
    v = sub.add_parser("verify", help="reconstruct random signals and report the error")
    v.add_argument("file")
    v.add_argument("--trials", type=int, default=50)
    v.add_argument("--exact", action="store_true",
                   help="accumulate the discrete part of the formula in rationals")
    v.set_defaults(func=cmd_verify)
    c = sub.add_parser("scan", help="numerical frame bounds over a frequency grid")
    c.add_argument("file")
    c.set_defaults(func=cmd_scan)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RankAmbiguous as exc:
        print(f"ambiguous rank decision: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (NoFilters, NoPolynomialInverse) as exc:
        print(f"no compactly supported filters: {exc}", file=sys.stderr)
        return EXIT_NONE
    except DegreeCapExceeded as exc:
        print(f"degree cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ReductionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
