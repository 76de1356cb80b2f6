"""Command-line front end.

    minterp validate  instance.json
    minterp compute   instance.json --what km|jm|beta|p|delta [--t T | --theta TH --q Q]
    minterp verify    [instance.json | --random N --seed S] --suite NAME [--jobs J]

Exit codes: 0 success, 1 invariant failure, 2 input or usage error.
The JSON report is canonical (sorted keys, cases in id order) and holds no
timings unless ``--timings`` is given, so reruns compare byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import verify as V
from .functionals import jm_matrix, km_matrix
from .interp_jmprime import delta_matrix, p_func
from .interp_km import WindowCapExceeded, beta_matrix
from .operators import OperatorError, PreconditionError, operator_from_dict
from .pairspace import (
    DEFAULT_TOL,
    CompatiblePair,
    InterpParams,
    MetricStructureError,
    PairError,
    PointError,
    intersection,
    parse_q,
    validate_instance,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- input ------------------------------------------------------------------


def _read_json(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc})") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a JSON object")
    return data


def load_input(path: str):
    """``(pair, operator)``; ``operator`` is ``None`` unless the file has a ``map`` key."""
    data = _read_json(path)
    try:
        if "map" in data:
            T = operator_from_dict(data, base=Path(path).parent)
            return T.domain, T
        return CompatiblePair.from_dict(data), None
    except (MetricStructureError, OperatorError, PointError) as exc:
        raise UsageError(f"{path}: {exc}") from None
    except OSError as exc:
        raise UsageError(f"{path}: cannot read referenced instance ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: referenced instance is malformed JSON ({exc})") from None


def _params(args) -> InterpParams:
    try:
        return InterpParams(args.theta, parse_q(args.q))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _grid(args) -> list[InterpParams]:
    thetas = [args.theta] if args.theta is not None else list(V.THETAS)
    qs = [parse_q(args.q)] if args.q is not None else list(V.QS)
    try:
        return [InterpParams(th, q) for th in thetas for q in qs]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- output -----------------------------------------------------------------


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return f"{v:.6g}"


def format_table(points, cells) -> str:
    body = [[_fmt(c) for c in row] for row in cells]
    width = max([len(p) for p in points] + [len(c) for row in body for c in row])
    lines = [" " * width + "  " + "  ".join(p.rjust(width) for p in points)]
    for p, row in zip(points, body):
        lines.append(p.rjust(width) + "  " + "  ".join(c.rjust(width) for c in row))
    return "\n".join(lines)


def emit(args, doc: dict, text: str):
    out = canonical_json(doc) if args.format == "json" else text.rstrip("\n") + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


# -- commands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    pair, _ = load_input(args.instance)
    try:
        reports = validate_instance(pair, args.tol)
    except PairError as exc:
        raise UsageError(str(exc)) from None
    ok = all(r.ok for r in reports)
    doc = {
        "command": {"name": "validate", "tol": args.tol},
        "digest": pair.digest(),
        "ok": ok,
        "reports": [r.as_dict() for r in reports],
    }
    lines = [f"instance {pair.digest()[:16]}  points={len(pair.union)}  |X0 ∩ X1|={len(intersection(pair))}"]
    for r in reports:
        lines.append(f"{r.subject}: {'ok' if r.ok else 'FAIL'}")
        for v in r.violations:
            lines.append(f"  {v.axiom} at {tuple(v.witness)}: {v.detail}")
    emit(args, doc, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_compute(args) -> int:
    pair, _ = load_input(args.instance)
    what = args.what
    result: dict = {}
    if what in ("km", "jm"):
        if not (args.t > 0 and math.isfinite(args.t)):
            raise UsageError(f"--t must be positive and finite, got {args.t}")
        params_doc = {"t": args.t}
        if what == "km":
            points, M = pair.union, km_matrix(pair, args.t)
        else:
            points, M = intersection(pair), jm_matrix(pair, args.t)
        cells = M.tolist()
    else:
        params = _params(args)
        params_doc = params.as_dict()
        points = intersection(pair)
        if what == "beta":
            bm = beta_matrix(pair, params)
            cells = [[v.as_list() for v in row] for row in bm.values]
            result["window"] = bm.window
        elif what == "p":
            cells, chains = [], {}
            for x in points:
                row = []
                for y in points:
                    value, chain = p_func(pair, params, x, y)
                    row.append(value)
                    if x != y:
                        chains[f"{x},{y}"] = chain.as_dict()
                cells.append(row)
            result["chains"] = chains
        else:
            cells = delta_matrix(pair, params).values.tolist()
    result.update({"points": list(points), "values": cells})
    doc = {
        "command": {"name": "compute", "what": what, **params_doc},
        "digest": pair.digest(),
        "result": result,
    }
    head = f"{what}  " + "  ".join(f"{k}={v}" for k, v in params_doc.items())
    if what == "p":
        head += "\n(row x, column y: cheapest sequence from y on the left to x on the right)"
    text = head + "\n" + format_table(points, cells)
    if what == "beta":
        text += "\n(certified intervals [lo, hi])"
    emit(args, doc, text)
    return EXIT_OK


def _verify_specs(args) -> tuple[list[V.CaseSpec], dict]:
    grid = tuple(_grid(args))
    if args.instance is not None:
        pair, T = load_input(args.instance)
        try:
            for r in validate_instance(pair, args.tol):
                if not r.ok:
                    raise UsageError(f"{args.instance}: {r.subject} is not valid ({r.violations[0].detail})")
        except PairError as exc:
            raise UsageError(str(exc)) from None
        specs = [V.CaseSpec(args.suite, 0, args.seed, pair, T, grid, args.tol)]
        source = {"instance": pair.digest(), "operator": T is not None}
    else:
        n = args.random if args.random is not None else 1
        if n < 1:
            raise UsageError("--random needs a positive count")
        specs = [V.CaseSpec(args.suite, i, args.seed, None, None, grid, args.tol) for i in range(n)]
        source = {"random": n, "seed": args.seed}
    return specs, source


def cmd_verify(args) -> int:
    if args.instance is not None and args.random is not None:
        raise UsageError("give either an instance file or --random, not both")
    specs, source = _verify_specs(args)
    t0 = time.perf_counter()
    try:
        results = V.run_cases(specs, args.jobs)
    except PreconditionError as exc:
        raise UsageError(str(exc)) from None
    elapsed = time.perf_counter() - t0
    summary = V.summarize(results)
    doc = {
        "command": {
            "name": "verify",
            "suite": args.suite,
            "tol": args.tol,
            "grid": [p.as_dict() for p in specs[0].grid or V.default_grid()],
            **source,
        },
        "summary": summary,
        "cases": [
            {"case": r["case"], "digest": r["digest"], "failed": sum(c["failed"] for c in r["checks"].values()),
             **r["info"]}
            for r in results
        ],
    }
    if args.timings:
        doc["timings"] = {"wall_s": elapsed}

    lines = [f"suite {args.suite}: {summary['cases']} case(s), "
             f"{'all checks passed' if summary['ok'] else str(summary['failed_checks']) + ' failed check(s)'}"]
    for name, c in summary["checks"].items():
        lines.append(f"  {'ok  ' if not c['failed'] else 'FAIL'}  {name}: {c['passed']} passed, {c['failed']} failed")
        for w in c["witnesses"]:
            lines.append(f"        witness {json.dumps(w, sort_keys=True)}")
    shown = {k: v for k, v in summary["observations"].items() if v}
    if shown:
        lines.append("observations (measured, not asserted):")
        lines.extend(f"  {k}: {v}" for k, v in shown.items())
    fixed = [r for r in results if "fixed_point" in r["info"]]
    if len(fixed) == 1:
        lines.append(f"fixed point: {fixed[0]['info']['fixed_point']}")
    elif fixed:
        lines.append(f"fixed points found for {len(fixed)} contraction(s)")
    lines.append(f"wall time {elapsed:.2f} s")
    emit(args, doc, "\n".join(lines))
    return EXIT_OK if summary["ok"] else EXIT_FAIL


# -- parser -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="comparison tolerance (default 1e-9)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("text", "json"), default="text")

    ap = _Parser(prog="minterp", description="Interpolated metrics on finite compatible pairs.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check metric axioms and compatibility")
    p.add_argument("instance")

    p = sub.add_parser("compute", parents=[common], help="print one distance table")
    p.add_argument("instance")
    p.add_argument("--what", choices=("km", "jm", "beta", "p", "delta"), required=True)
    p.add_argument("--t", type=float, default=1.0, help="scale for km and jm")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--q", default="inf", help="float >= 1 or 'inf'")

    p = sub.add_parser("verify", parents=[common], help="run property suites")
    p.add_argument("instance", nargs="?", help="instance or operator JSON (omit with --random)")
    p.add_argument("--random", type=int, help="number of generated cases")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--suite", choices=("all",) + V.SUITES, default="all")
    p.add_argument("--theta", type=float, help="restrict the parameter grid")
    p.add_argument("--q", help="restrict the parameter grid")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--timings", action="store_true", help="add wall-clock timings to the JSON report")
    return ap


COMMANDS = {"validate": cmd_validate, "compute": cmd_compute, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    np.seterr(all="ignore")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"minterp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WindowCapExceeded as exc:
        print(f"minterp: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
