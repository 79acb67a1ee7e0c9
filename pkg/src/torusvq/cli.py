"""Command-line interface.

Every command writes either CSV (UTF-8, LF line endings, header row) or a
single JSON object with ``manifest`` and ``result`` keys.  Floats use Python's
shortest round-trip representation, so identical inputs give identical bytes.
The manifest timestamp honours ``SOURCE_DATE_EPOCH`` for reproducible runs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .activation import approx_error, approx_posterior
from .asymptotics import asymptotic_crossing_M, boundary_two_three
from .codec import DomainError, Manifold, ProblemSpec, Regime, build_profile, posterior_eval
from .compare import winner_boundary
from .solver import SolverError, solve

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return datetime.fromtimestamp(t, timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _manifest(command: str, params: dict, seed: int | None = None) -> dict:
    m = {"command": command, "parameters": params, "version": __version__}
    if seed is not None:
        m["seed"] = seed
    m["timestamp"] = _timestamp()
    return m


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _emit(args, manifest: dict, header: list[str], rows: list[list], result) -> None:
    """Write CSV rows or a JSON document to ``--out`` or stdout."""
    if args.format == "json":
        text = json.dumps({"manifest": manifest, "result": _jsonable(result)}, indent=2) + "\n"
    else:
        text = _csv(header, rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if args.format == "csv":
            with open(args.out + ".manifest.json", "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(_jsonable(manifest), indent=2) + "\n")
    else:
        sys.stdout.write(text)


def _spec(args) -> ProblemSpec:
    if args.integer_M and float(args.M) != int(args.M):
        raise UsageError(f"integer M required (got {args.M!r})")
    return ProblemSpec(Manifold(args.manifold), args.M, args.n)


def _s_unit(spec: ProblemSpec) -> float:
    # pi/M_eff for circle and joint coding, 2 pi/M for factorial coding; both are half the spacing
    return 0.5 * spec.delta


SOLVE_COLUMNS = ["manifold", "M", "n", "regime", "s", "s_over_piM", "r", "d1", "d2", "d_total"]


def cmd_solve(args) -> int:
    spec = _spec(args)
    sol = solve(spec)
    row = [spec.manifold.value, spec.M, spec.n, sol.regime.value, sol.s, sol.s / _s_unit(spec),
           sol.r, sol.d1, sol.d2, sol.d_total]
    params = {"manifold": spec.manifold.value, "M": spec.M, "n": spec.n}
    _emit(args, _manifest("solve", params), SOLVE_COLUMNS, [row], dict(zip(SOLVE_COLUMNS, row)))
    return EXIT_OK


SWEEP_COLUMNS = ["M", "n", "s", "s_normalized", "regime", "r", "d_total", "error"]


def _n_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 1 or lo > hi:
        raise UsageError(f"empty n range: [{lo!r}, {hi!r}] with {steps} steps")
    return np.geomspace(lo, hi, steps) if steps > 1 else np.array([lo])


def cmd_sweep(args) -> int:
    ns = _n_grid(args.n_range[0], args.n_range[1], args.steps)
    Ms = args.M
    if not Ms:
        raise UsageError("at least one M value required")
    rows = []
    for M in Ms:
        for n in ns:
            try:
                spec = ProblemSpec(Manifold(args.manifold), M, float(n))
                sol = solve(spec)
                rows.append([spec.M, spec.n, sol.s, sol.s / _s_unit(spec), sol.regime.value, sol.r,
                             sol.d_total, ""])
            except (DomainError, SolverError) as exc:
                rows.append([float(M), float(n), None, None, None, None, None, str(exc)])
    params = {"manifold": args.manifold, "M": [float(m) for m in Ms], "n_range": list(args.n_range),
              "steps": args.steps}
    result = [dict(zip(SWEEP_COLUMNS, r)) for r in rows]
    _emit(args, _manifest("sweep", params), SWEEP_COLUMNS, rows, result)
    ok = any(r[-1] == "" for r in rows)
    if not ok:
        print("error: no grid point could be solved", file=sys.stderr)
    return EXIT_OK if ok else EXIT_USAGE


def cmd_boundary(args) -> int:
    lo, hi = args.range
    if args.steps < 1 or lo > hi:
        raise UsageError(f"empty range: [{lo!r}, {hi!r}] with {args.steps} steps")
    if args.kind == "joint-factorial":
        ns = np.geomspace(lo, hi, args.steps) if args.steps > 1 else np.array([lo])
        limit = asymptotic_crossing_M()
        header = ["n", "M_critical", "M_asymptotic"]
        rows = [[float(n), winner_boundary(float(n)), limit] for n in ns]
    else:
        manifold = Manifold.CIRCLE if args.kind == "two-three-circle" else Manifold.TORUS_FACTORIAL
        scale = 1.0 if manifold is Manifold.CIRCLE else 0.5
        Ms = np.linspace(lo, hi, args.steps) if args.steps > 1 else np.array([lo])
        header = ["M", "n_exact", "n_asymptotic"]
        rows = []
        for M in Ms:
            b = boundary_two_three(float(M) * scale, manifold)
            rows.append([float(M), b.n_exact, b.n_asymptote])
    params = {"kind": args.kind, "range": [lo, hi], "steps": args.steps}
    _emit(args, _manifest("boundary", params), header, rows, [dict(zip(header, r)) for r in rows])
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run

    report = run(args.level, args.seed, args.tol)
    summary = report.summary()
    rows = [[c["id"], c["family"], c["passed"], c["value"], c["limit"]] for c in summary["checks"]]
    params = {"level": args.level, "tol": args.tol}
    _emit(args, _manifest("verify", params, seed=args.seed), ["id", "family", "passed", "value", "limit"],
          rows, summary)
    if not report.passed:
        print("verification failed: " + ", ".join(report.failures), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


POSTERIOR_COLUMNS = ["theta", "p", "p_theta_plus_delta", "p_theta_minus_delta"]


def cmd_posterior(args) -> int:
    if args.points < 1:
        raise UsageError("points >= 1 required")
    spec = _spec(args)
    sol = solve(spec)
    prof = build_profile(spec, sol.s, sol.regime)
    k = np.arange(args.points)
    theta = 2.0 * math.pi * (k - (args.points - 1) / 2.0) / args.points
    p0 = np.atleast_1d(posterior_eval(prof, theta))
    pp = np.atleast_1d(posterior_eval(prof, theta + spec.delta))
    pm = np.atleast_1d(posterior_eval(prof, theta - spec.delta))
    rows = [list(map(float, r)) for r in zip(theta, p0, pp, pm)]
    params = {"manifold": spec.manifold.value, "M": spec.M, "n": spec.n, "points": args.points}
    result = {"regime": sol.regime.value, "s": sol.s, "rows": [dict(zip(POSTERIOR_COLUMNS, r)) for r in rows]}
    _emit(args, _manifest("posterior", params), POSTERIOR_COLUMNS, rows, result)
    return EXIT_OK


APPROX_COLUMNS = ["kind", "theta", "p_exact", "p_approx", "difference", "sup_error", "exact_cubic",
                  "approx_cubic"]


def cmd_approx(args) -> int:
    spec = ProblemSpec(Manifold.CIRCLE, args.M, args.n)
    sol = solve(spec)
    if sol.regime is not Regime.TWO_OVERLAP:
        raise UsageError("the hinge approximation is only defined when at most two posteriors overlap "
                         f"(optimum at M={spec.M:g}, n={spec.n:g} has three)")
    if sol.s == 0.0:
        raise UsageError("the hinge approximation needs s > 0 (n > 1)")
    prof = build_profile(spec, sol.s, sol.regime)
    half = 0.5 * spec.delta
    theta = np.linspace(half - sol.s, half + sol.s, args.points)
    pe = posterior_eval(prof, theta)
    pa = approx_posterior(theta, sol.s, spec.M)
    err = approx_error(sol.s, spec.M)
    rows = [["grid", float(t), float(a), float(b), float(a - b), None, None, None]
            for t, a, b in zip(theta, pe, pa)]
    rows.append(["summary", err.theta_at_sup, None, None, None, err.sup_error, err.exact_cubic,
                 err.approx_cubic])
    params = {"M": spec.M, "n": spec.n, "points": args.points}
    result = {"s": sol.s, "sup_error": err.sup_error, "theta_at_sup": err.theta_at_sup,
              "exact_cubic": err.exact_cubic, "approx_cubic": err.approx_cubic,
              "rows": [dict(zip(APPROX_COLUMNS[1:5], r[1:5])) for r in rows[:-1]]}
    _emit(args, _manifest("approx", params), APPROX_COLUMNS, rows, result)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, default_format: str) -> None:
    p.add_argument("--format", choices=("json", "csv"), default=default_format)
    p.add_argument("--out", help="output path (default: stdout)")


def _add_spec(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifold", choices=[m.value for m in Manifold], default="circle")
    p.add_argument("--M", type=float, required=True, help="neuron count")
    p.add_argument("--n", type=float, required=True, help="firing-event count")
    p.add_argument("--integer-M", action="store_true", help="reject non-integer M")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torusvq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal s, r and distortion for one problem")
    _add_spec(p)
    _add_common(p, "json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="optimal s over an (M, n) grid")
    p.add_argument("--manifold", choices=[m.value for m in Manifold], default="circle")
    p.add_argument("--M", type=float, nargs="+", required=True, help="neuron counts")
    p.add_argument("--n-range", type=float, nargs=2, metavar=("LO", "HI"), required=True)
    p.add_argument("--steps", type=int, default=25, help="geometric steps in n")
    _add_common(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("boundary", help="regime or encoder boundary curves")
    p.add_argument("--kind", choices=("two-three-circle", "two-three-factorial", "joint-factorial"),
                   required=True)
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"), required=True,
                   help="M range for two-three kinds, n range for joint-factorial")
    p.add_argument("--steps", type=int, default=25)
    _add_common(p, "csv")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("verify", help="cross-check closed forms against numerical oracles")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8, help="relative closed-form tolerance")
    _add_common(p, "json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("posterior", help="dump the optimal posterior and its neighbours")
    _add_spec(p)
    p.add_argument("--points", type=int, default=1000)
    _add_common(p, "csv")
    p.set_defaults(func=cmd_posterior)

    p = sub.add_parser("approx", help="exact versus hinge-activation posterior")
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--points", type=int, default=201)
    _add_common(p, "csv")
    p.set_defaults(func=cmd_approx)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, UsageError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
