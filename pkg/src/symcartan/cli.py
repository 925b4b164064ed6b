"""Command-line entry point.

Exit codes: 0 all tasks passed, 1 an expected value did not match, 2 the
problem file or a parameter is invalid, 3 a computation failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .tasks import (
    EXIT_COMPUTE,
    EXIT_OK,
    EXIT_SCHEMA,
    Options,
    SchemaError,
    error_object,
    load_problem,
    run,
)

PROBLEM_SUBCOMMANDS = ("kill", "cohomology", "affine", "pw", "pw-lift", "kunneth", "circle",
                       "lieadm", "geodesic", "identities")


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    return json.loads(Path(path).read_text())


def _params(args: argparse.Namespace) -> dict:
    """Task parameters set explicitly on the command line."""
    out = {}
    for key in ("r", "degree", "potential_degree", "cap", "samples", "rmax", "trials",
                "max_degree", "h", "T", "csv"):
        value = getattr(args, key, None)
        if value is not None:
            out[key] = value
    for key in ("start", "velocity"):
        value = getattr(args, key, None)
        if value is not None:
            out[key] = [float(x) for x in value.split(",")]
    if getattr(args, "no_escalate", False):
        out["escalate"] = False
    if getattr(args, "cross_check", False):
        out["cross_check"] = True
    if getattr(args, "factor", None):
        out["factor"] = _read_json(args.factor)
    if getattr(args, "params", None):
        out.update(json.loads(args.params))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symcartan", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for quasi-random sampling")
    common.add_argument("--tol", type=float, default=None, help="override numeric tolerances")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run every task listed in a problem file")
    p.add_argument("problem")

    specs = {
        "kill": ("Killing tensors within a polynomial ansatz", ["r", "degree", "samples"]),
        "cohomology": ("symmetric cohomology Hʳ", ["r", "degree", "potential_degree", "cap"]),
        "affine": ("affine and parallel vector fields, parallel bivectors", ["degree"]),
        "pw": ("Patterson–Walker metric and lifted connections", ["trials"]),
        "pw-lift": ("first cohomology of the lifted connection", ["degree"]),
        "kunneth": ("Künneth subspace of a product", ["r", "degree"]),
        "circle": ("classification of connections on the circle", []),
        "lieadm": ("Lie-admissible algebra cohomology table", ["rmax"]),
        "geodesic": ("RK4 geodesics, conserved quantities, spray check", ["samples"]),
        "identities": ("commutation relations and variation identities", ["max_degree"]),
    }
    for name, (text, ints) in specs.items():
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("problem", help="problem JSON file ('-' for stdin)")
        for flag in ints:
            p.add_argument(f"--{flag.replace('_', '-')}", dest=flag, type=int)
        p.add_argument("--params", help="extra task parameters as a JSON object")
        if name in ("kill", "cohomology"):
            p.add_argument("--no-escalate", action="store_true")
        if name == "pw-lift":
            p.add_argument("--cross-check", action="store_true")
        if name == "kunneth":
            p.add_argument("--factor", help="JSON file with the second factor's manifold and connection")
        if name == "geodesic":
            p.add_argument("--h", type=float)
            p.add_argument("--T", dest="T", type=float)
            p.add_argument("--start", help="comma-separated coordinates")
            p.add_argument("--velocity", help="comma-separated components")
            p.add_argument("--csv", help="write per-step samples as CSV")

    p = sub.add_parser("corpus", parents=[common], help="run the golden corpus and acceptance criteria")
    p.add_argument("--filter", default=None, help="only cases whose name or tags contain this text")
    p.add_argument("--no-acceptance", action="store_true", help="skip the acceptance criteria")
    return parser


def _lieadm_input(data):
    # the lieadm subcommand also takes the bare {"dim": n, "product": {...}} form
    if isinstance(data, dict) and "algebra" not in data and "dim" in data and "manifold" not in data:
        return {"name": "algebra", "algebra": data}
    return data


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    opt = Options(seed=args.seed, tol=args.tol)
    if args.command == "corpus":
        from .golden import corpus

        report, code = corpus(args.filter, opt, acceptance=not args.no_acceptance, echo=sys.stderr)
        _emit(report, args.out)
        return code
    try:
        data = _read_json(args.problem)
        if args.command == "lieadm":
            data = _lieadm_input(data)
        problem = load_problem(data)
        params = _params(args) if args.command != "run" else None
    except (OSError, json.JSONDecodeError, SchemaError) as exc:
        _emit({"status": "error", "exit_code": EXIT_SCHEMA, "error": error_object("schema", exc)}, args.out)
        return EXIT_SCHEMA
    try:
        if args.command == "run":
            report, code = run(problem, opt)
        else:
            report, code = run(problem, opt, only=args.command, extra=params)
    except Exception as exc:  # noqa: BLE001
        _emit({"status": "error", "exit_code": EXIT_COMPUTE, "error": error_object("computation", exc)},
              args.out)
        return EXIT_COMPUTE
    _emit(report, args.out)
    return code if code is not None else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
