"""Command-line interface: ``gpground {solve,sweep,asym,special,verify}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import specfun
from .asymptotics import law
from .harness import (SweepError, geometric_grid, resolve_jobs, sweep, write_manifest,
                      write_sweep_csv)
from .profiles import CriticalParams, parse_p
from .shooting import ShootingError, solve_lambda, write_profile_csv
from .verify import VerifyConfig, parse_config, run_verify


def _params(text: str) -> CriticalParams:
    try:
        return CriticalParams(parse_p(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _num(x):
    return x if math.isfinite(x) else repr(x)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_solve(args) -> int:
    gs = solve_lambda(args.b, args.p, args.tol)
    if args.out:
        write_profile_csv(gs.profile, args.out)
    _emit({"p": args.p.label(), "b": gs.b, "lambda": gs.lam, "c": _num(gs.c),
           "c_spread": _num(gs.c_spread), "lambda_bracket_width": gs.lambda_bracket_width})
    return 0


def cmd_sweep(args) -> int:
    grid = geometric_grid(args.b_min, args.b_max, args.per_decade)
    jobs = resolve_jobs(args.jobs)
    try:
        records = sweep(args.p, grid, args.tol, jobs=jobs)
        failed = []
    except SweepError as exc:
        records = exc.records
        failed = [r.b for r in records if not r.ok]
    write_sweep_csv(records, args.out, timing=not args.no_timing)
    manifest_path = Path(args.out).with_suffix(".manifest.json")
    write_manifest(manifest_path, args.p, tol=args.tol,
                   extra={"b_min": args.b_min, "b_max": args.b_max,
                          "per_decade": args.per_decade, "jobs": jobs,
                          "records": len(records), "failed": failed})
    _emit({"out": str(args.out), "manifest": str(manifest_path), "records": len(records),
           "failed": failed})
    return 1 if failed else 0


def cmd_asym(args) -> int:
    lw = law(args.p)
    _emit({"p": args.p.label(), "branch": lw.branch.value, "C_p": lw.C_p, "A_p": lw.A_p,
           "formula": lw.formula})
    return 0


def cmd_special(args) -> int:
    out = {"fn": args.fn, "z": args.z}
    if args.fn == "gamma":
        value = specfun.gamma(args.z)
    elif args.fn == "digamma":
        value = specfun.digamma(args.z)
    else:
        if args.alpha is None or args.beta is None:
            raise ValueError(f"{args.fn} needs --alpha and --beta")
        kp = specfun.KummerParams(args.alpha, args.beta)
        out.update(alpha=args.alpha, beta=args.beta)
        if args.fn == "kummer":
            value = specfun.kummer_m(args.z, kp)
        else:
            value = specfun.tricomi_u(args.z, kp)
            out["branch"] = specfun.tricomi_branch(args.z, kp)
    out["value"] = _num(value)
    _emit(out)
    return 0


def cmd_verify(args) -> int:
    cfg = parse_config(Path(args.config).read_text()) if args.config else VerifyConfig()
    if args.report:
        cfg.report = args.report
    if args.jobs is not None:
        cfg.jobs = args.jobs
    code, report = run_verify(cfg)
    _emit(report)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gpground", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="ground state for one amplitude b")
    s.add_argument("--p", type=_params, required=True, help="exponent, e.g. 2/5 or 0.4")
    s.add_argument("--b", type=float, required=True, help="central amplitude u(0)")
    s.add_argument("--tol", type=float, default=1e-10, help="bracket width on lambda")
    s.add_argument("--out", help="write the profile as r,f,fp CSV")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("sweep", help="lambda(b), c(b) over a geometric grid of b")
    s.add_argument("--p", type=_params, required=True)
    s.add_argument("--b-min", type=float, required=True)
    s.add_argument("--b-max", type=float, required=True)
    s.add_argument("--per-decade", type=int, default=25)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--jobs", type=int, default=None, help="worker threads (GPE_JOBS overrides)")
    s.add_argument("--out", required=True, help="sweep CSV path; manifest goes alongside")
    s.add_argument("--no-timing", action="store_true",
                   help="leave wall_ms empty so reruns are byte-identical")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("asym", help="leading-order constants for p")
    s.add_argument("--p", type=_params, required=True)
    s.set_defaults(func=cmd_asym)

    s = sub.add_parser("special", help="evaluate one special function")
    s.add_argument("--fn", choices=("gamma", "digamma", "kummer", "tricomi"), required=True)
    s.add_argument("--z", type=float, required=True)
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta", type=float)
    s.set_defaults(func=cmd_special)

    s = sub.add_parser("verify", help="run the acceptance criteria")
    s.add_argument("--config", help="key = value config file")
    s.add_argument("--report", help="JSON report path (overrides the config)")
    s.add_argument("--jobs", type=int, default=None)
    s.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, ShootingError) as exc:
        print(f"gpground {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
