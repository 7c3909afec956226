"""Command-line entry point: ``ceoleak <subcommand> ...``.

Exit status: 0 success, 1 a verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import discrete as db
from . import gaussian as gb
from . import io as cio
from . import verify as vf
from .geometry import RateTuple
from .info import build_joint
from .sampling import bsc_model, copy_aux

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _positive(text: str) -> float:
    v = _float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _grid_size(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 2:
        raise argparse.ArgumentTypeError("grid size must be >= 2")
    return v


def _l1_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected start:stop:step, e.g. 0:3:0.05")
    start, stop, step = (_float(p) for p in parts)
    if step <= 0 or stop < start or start < 0:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    return gb.l1_grid(start, stop, step)


def _point(text: str) -> RateTuple:
    parts = text.split(",")
    if len(parts) != 5:
        raise argparse.ArgumentTypeError("expected R1,R2,L1,L2,D")
    vals = [_float(p) for p in parts]
    try:
        return RateTuple(*vals)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _emit(text: str, out):
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _add_gaussian_params(p):
    p.add_argument("--sigma-x2", type=_positive, default=2.0, help="source variance")
    p.add_argument("--sigma-n1", type=_positive, default=1.0, help="agent 1 noise variance")
    p.add_argument("--sigma-n2", type=_positive, default=1.0, help="agent 2 noise variance")
    p.add_argument("--grid", type=_grid_size, default=201, help="(r1, r2) grid points per axis")
    p.add_argument("--headroom", type=_positive, default=4.0,
                   help="bits added to the finite rates to bound the r search")


def _cfg(args) -> gb.SearchConfig:
    return gb.SearchConfig(grid=args.grid, headroom=args.headroom)


def cmd_gaussian_curve(args) -> int:
    metrics = gb.METRICS if args.metric == "both" else (args.metric,)
    cfg = _cfg(args)
    if args.table1:
        if args.out is None:
            raise cio.InputError("--table1 needs --out DIR")
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for row in gb.TABLE1:
            params = gb.table1_params(row)
            for metric in metrics:
                rows = gb.leakage_curve(params, row["R1"], row["R2"], args.l1_grid, metric,
                                        args.l2, cfg)
                path = outdir / f"table1_row{row['row']}_{metric}.csv"
                path.write_text(cio.curve_csv(rows))
                print(f"wrote {path}")
        return EXIT_OK
    if len(metrics) != 1:
        raise cio.InputError("--metric both is only available with --table1")
    params = gb.GaussianCeoParams(args.sigma_x2, args.sigma_n1, args.sigma_n2)
    rows = gb.leakage_curve(params, args.r1, args.r2, args.l1_grid, metrics[0], args.l2, cfg)
    _emit(cio.curve_csv(rows), args.out)
    return EXIT_OK


def cmd_gaussian_member(args) -> int:
    params = gb.GaussianCeoParams(args.sigma_x2, args.sigma_n1, args.sigma_n2)
    res = gb.membership(params, args.point, args.metric, _cfg(args))
    doc = {"point": args.point.to_dict(), "metric": args.metric, **res.to_dict()}
    _emit(cio.dumps(doc), args.out)
    return EXIT_OK


def cmd_discrete_eval(args) -> int:
    mf = cio.load_model_file(args.input)
    inner = db.inner_bound_constraints(mf.model, mf.aux, mf.distortion)
    outer = db.outer_bound_constraints(mf.model, mf.aux, mf.distortion)
    joint = build_joint(mf.model, mf.aux)
    doc = {
        "distortion": "logloss" if mf.distortion is None else "matrix",
        "inner": inner.to_dict(),
        "outer": outer.to_dict(),
        "xi1": db.xi_k(joint, 1),
        "xi2": db.xi_k(joint, 2),
        "xi_prime": db.xi_prime(joint),
    }
    if mf.distortion is None:
        doc["logloss_si_gap"] = db.si_gap_report(mf.model, mf.aux)
    if args.format == "table":
        text = "\n".join([cio.constraint_table(inner), cio.constraint_table(outer),
                          f"xi1 = {doc['xi1']:.6g}, xi2 = {doc['xi2']:.6g}, "
                          f"xi' = {doc['xi_prime']:.6g}"]) + "\n"
    else:
        text = cio.dumps(doc)
    _emit(text, args.out)
    return EXIT_OK


def cmd_extreme_points(args) -> int:
    mf = cio.load_model_file(args.input)
    try:
        points = db.extreme_points(mf.model, mf.aux)
        rep = db.dominance_report(mf.model, mf.aux)
    except ValueError as e:
        raise cio.InputError(f"{args.input}: {e}") from None
    _emit(cio.extreme_points_csv(points), args.out)
    if args.report:
        Path(args.report).write_text(cio.dumps(rep.to_dict()))
    print(f"dominance: {rep.summary}", file=sys.stderr)
    return EXIT_OK if rep.verdict else EXIT_FAIL


def cmd_counterexample(args) -> int:
    if args.input:
        mf = cio.load_model_file(args.input)
        model, aux = mf.model, mf.aux
    else:
        model = bsc_model(args.crossover)
        aux = copy_aux(model, copy_u1=True, copy_u2=False)
    rep = db.equivocation_counterexample(model, aux)
    _emit(cio.dumps(rep.to_dict()), args.out)
    return EXIT_OK if rep.consistent else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.input:
        cio.load_model_file(args.input)
    names = vf.CHECKS if not args.checks else tuple(c.strip() for c in args.checks.split(","))
    unknown = [n for n in names if n not in vf.CHECKS]
    if unknown:
        raise cio.InputError(f"unknown check(s) {', '.join(unknown)}; "
                             f"choose from {', '.join(vf.CHECKS)}")
    results = vf.run_checks(names, seed=args.seed, sigma2_x=args.sigma_x2)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("verify: " + ("all checks passed" if ok else "FAILED"))
    if args.out:
        Path(args.out).write_text(cio.dumps({"seed": args.seed, "passed": ok,
                                             "checks": [r.to_dict() for r in results]}))
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ceoleak",
                                 description="Rate-distortion-leakage regions of the two-agent "
                                             "CEO problem with an eavesdropper.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gaussian-curve", help="minimum distortion versus L1 (CSV)")
    _add_gaussian_params(p)
    p.add_argument("--r1", "--R1", dest="r1", type=_float, default=0.5,
                   help="compression rate R1 (bits)")
    p.add_argument("--r2", "--R2", dest="r2", type=_float, default=0.5,
                   help="compression rate R2 (bits)")
    p.add_argument("--l2", type=_float, default=None, help="leakage budget L2; omitted = relaxed")
    p.add_argument("--metric", choices=gb.METRICS + ("both",), default=gb.LOGLOSS)
    p.add_argument("--l1-grid", type=_l1_grid, default=gb.l1_grid(), help="start:stop:step")
    p.add_argument("--table1", action="store_true",
                   help="run the four preset parameter rows; --out is a directory")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gaussian_curve)

    p = sub.add_parser("gaussian-member", help="region membership of one tuple (JSON)")
    _add_gaussian_params(p)
    p.add_argument("--point", type=_point, required=True, help="R1,R2,L1,L2,D (inf allowed)")
    p.add_argument("--metric", choices=gb.METRICS, default=gb.LOGLOSS)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gaussian_member)

    p = sub.add_parser("discrete-eval", help="inner/outer constraint sets for a model file")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_discrete_eval)

    p = sub.add_parser("extreme-points", help="outer-polytope vertices P1..P10 and dominance")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.add_argument("--report", default=None, help="optional JSON dominance report path")
    p.set_defaults(func=cmd_extreme_points)

    p = sub.add_parser("counterexample", help="equivocation inner/outer gap")
    p.add_argument("--input", default=None, help="model file; default is the BSC preset")
    p.add_argument("--crossover", type=_float, default=0.1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("verify", help="run the seeded verification suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checks", default=None, help=f"comma list from {','.join(vf.CHECKS)}")
    p.add_argument("--sigma-x2", type=_positive, default=None,
                   help="restrict the saturation suite to this source variance")
    p.add_argument("--input", default=None, help="also validate this model file")
    p.add_argument("--out", default=None, help="JSON summary path")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except cio.InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
