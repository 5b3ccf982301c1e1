"""Experiment runner: each subcommand packages one verification workflow.

    difflab check      -- admissibility report for one (γ, b, d, potential)
    difflab sweep      -- admissible γb intervals over a γ grid
    difflab barenblatt -- tabulate a self-similar profile
    difflab run        -- run experiment config(s): solve, record, fit, verify
    difflab rates      -- fit a decay model to an existing series CSV

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or domain
error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import admissibility
from .config import BoundSpec, ExperimentSpec, FitSpec, parse_experiment
from .errors import ConfigError, DomainError
from .functionals import FunctionalSeries
from .params import DiffusionParams
from .profiles import BarenblattProfile
from .ratefit import (
    default_window,
    fit_exponential,
    fit_power,
    last_decade_window,
    verify_bound,
)
from .rescaling import TO_DRIFTLESS, ScalingMap, transfer_series
from .solver import run as solver_run


def _resolve_window(series: FunctionalSeries, spec_window, model: str):
    if spec_window == "default":
        return default_window(series, model)
    if spec_window == "last_decade":
        return last_decade_window(series)
    return spec_window


def _run_fit(fit: FitSpec, series: FunctionalSeries):
    window = _resolve_window(series, fit.window, fit.model)
    if fit.model == "power":
        result = fit_power(series, window)
    else:
        result = fit_exponential(series, window)
    passed = True
    clauses = []
    if fit.expect is not None:
        if fit.side == "two":
            ok = abs(result.value - fit.expect) <= fit.tol
            clauses.append(f"expect {fit.expect:g} +- {fit.tol:g}")
        elif fit.side == "below":
            ok = result.value <= fit.expect + fit.tol
            clauses.append(f"expect <= {fit.expect:g} + {fit.tol:g}")
        else:
            ok = result.value >= fit.expect - fit.tol
            clauses.append(f"expect >= {fit.expect:g} - {fit.tol:g}")
        passed &= ok
    if fit.min_r2 is not None:
        passed &= result.r2 >= fit.min_r2
        clauses.append(f"r2 >= {fit.min_r2:g}")
    detail = (f"{fit.model} value={result.value:.6g} r2={result.r2:.6g} "
              f"window=[{result.window[0]:.6g}, {result.window[1]:.6g}]")
    if clauses:
        detail += " (" + ", ".join(clauses) + ")"
    return result, bool(passed), detail


def _run_bound(bound: BoundSpec, series: FunctionalSeries, slack: float):
    t, v = series.as_arrays()
    if bound.scale_by_t:
        v = v * t
    if bound.start_at is not None:
        keep = t >= bound.start_at * (1 - 1e-12)
        t, v = t[keep], v[keep]
    work = FunctionalSeries(series.kind, series.label)
    for tt, vv in zip(t, v):
        work.append(float(tt), float(vv))
    value = bound.value
    if bound.calibrate_at is not None:
        idx = int(np.argmin(np.abs(t - bound.calibrate_at)))
        value = v[idx] / t[idx] ** bound.exponent
    if value is None:
        raise ConfigError(f"[bound.{bound.name}] needs value or calibrate_at")
    if bound.kind == "const":
        fn = lambda tt: value  # noqa: E731
    elif bound.kind == "power":
        fn = lambda tt: value * tt ** bound.exponent  # noqa: E731
    else:
        raise ConfigError(f"[bound.{bound.name}] unknown kind {bound.kind!r}")
    report = verify_bound(work, fn, slack)
    passed = report.holds
    detail = (f"{bound.kind} threshold={value:.6g} worst_ratio={report.worst_ratio:.6g} "
              f"at t={report.worst_t:.6g} slack={slack:g}")
    final_value = float(v[-1])
    if bound.final_at_least is not None:
        ok = final_value >= bound.final_at_least
        passed = passed and ok
        detail += f", final={final_value:.6g} (need >= {bound.final_at_least:g})"
    return report, bool(passed), detail, value, final_value


def run_experiment(spec: ExperimentSpec, outdir: str, slack_override: float | None = None):
    """Solve, record, verify, and write one experiment.

    Returns (exit_code, trajectory, series_map) where series_map includes any
    transferred series alongside the recorded ones.
    """
    os.makedirs(outdir, exist_ok=True)
    traj = solver_run(spec.solver)
    traj.save(outdir, snapshots=spec.solver.keep_fields)
    available = dict(traj.series)

    for tr in spec.transfers:
        if tr.series not in available:
            raise ConfigError(f"[transfer.{tr.name}] references unknown series {tr.series!r}")
        smap = ScalingMap(DiffusionParams(spec.solver.params.gamma, spec.solver.params.dim),
                          TO_DRIFTLESS)
        moved = transfer_series(smap, available[tr.series], tr.b)
        available[moved.label] = moved
        moved.to_csv(os.path.join(outdir, f"{moved.label}.csv"))

    lines = []
    all_pass = True
    fit_rows = ["name,series,model,value,prefactor,r2,window_lo,window_hi,expect,tol,side,min_r2,passed"]

    def handle_fit(fit: FitSpec, series: FunctionalSeries):
        nonlocal all_pass
        result, passed, detail = _run_fit(fit, series)
        all_pass &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} fit {fit.name}: {detail}")
        fit_rows.append(
            f"{fit.name},{series.label},{fit.model},{result.value:.17g},"
            f"{result.prefactor:.17g},{result.r2:.17g},{result.window[0]:.17g},"
            f"{result.window[1]:.17g},"
            f"{'' if fit.expect is None else format(fit.expect, '.17g')},{fit.tol:.17g},"
            f"{fit.side},{'' if fit.min_r2 is None else format(fit.min_r2, '.17g')},"
            f"{int(passed)}")

    for fit in spec.fits:
        if fit.series not in available:
            raise ConfigError(f"[fit.{fit.name}] references unknown series {fit.series!r}")
        handle_fit(fit, available[fit.series])
    for tr in spec.transfers:
        if tr.fit is not None:
            label = f"weighted_gap_b={tr.b:g}_transferred"
            handle_fit(FitSpec(name=tr.name, series=label, model=tr.fit.model,
                               window=tr.fit.window, expect=tr.fit.expect, tol=tr.fit.tol,
                               min_r2=tr.fit.min_r2, side=tr.fit.side), available[label])

    bound_rows = ["name,series,kind,threshold,exponent,scale_by_t,slack,worst_ratio,worst_t,final,passed"]
    for bound in spec.bounds:
        if bound.series not in available:
            raise ConfigError(f"[bound.{bound.name}] references unknown series {bound.series!r}")
        slack = bound.slack if slack_override is None else slack_override
        report, passed, detail, value, final_value = _run_bound(
            bound, available[bound.series], slack)
        all_pass &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} bound {bound.name}: {detail}")
        bound_rows.append(
            f"{bound.name},{bound.series},{bound.kind},{value:.17g},{bound.exponent:.17g},"
            f"{int(bound.scale_by_t)},{slack:.17g},{report.worst_ratio:.17g},"
            f"{report.worst_t:.17g},{final_value:.17g},{int(passed)}")

    with open(os.path.join(outdir, "fits.csv"), "w") as fh:
        fh.write("\n".join(fit_rows) + "\n")
    with open(os.path.join(outdir, "bounds.csv"), "w") as fh:
        fh.write("\n".join(bound_rows) + "\n")
    checked = len(spec.fits) + len(spec.bounds) + sum(1 for tr in spec.transfers if tr.fit)
    status = "PASS" if all_pass else "FAIL"
    lines.append(f"{status} {spec.name}: {checked} check(s)")
    with open(os.path.join(outdir, "summary.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return (0 if all_pass else 1), traj, available


def _run_one(args_tuple):
    path, out_base, slack = args_tuple
    spec = parse_experiment(path)
    outdir = os.path.join(out_base, spec.name)
    return run_experiment(spec, outdir, slack)[0]


def cmd_run(args) -> int:
    jobs = [(path, args.out, args.slack) for path in args.config]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(_run_one, jobs))
    else:
        codes = [_run_one(j) for j in jobs]
    return max(codes)


def cmd_check(args) -> int:
    if args.b is None and args.gamma_b is None:
        raise ConfigError("provide --b or --gamma-b")
    b = args.b if args.b is not None else args.gamma_b / args.gamma
    report = admissibility.check(args.gamma, b, args.dim, args.potential)
    print(report.text())
    for row in report.rows():
        print(row)
    return 0 if report.admissible else 1


def cmd_sweep(args) -> int:
    rows = ["gamma,regime,lo,hi,lo_open,hi_open,empty"]
    for regime, sign in (("pme", 1.0), ("fde", -1.0)):
        limit, strict = admissibility.clause_i_limit(args.potential, regime, args.dim)
        if regime == "fde":
            limit = min(limit, 2.0 / args.dim)
        if not math.isfinite(limit):
            limit = 1.0
        grid = np.linspace(limit / args.points, limit, args.points)
        if strict:
            grid = grid[:-1]
        for g in grid:
            gamma = sign * float(g)
            iv = admissibility.admissible_interval(gamma, args.dim, args.potential)
            rows.append(
                f"{gamma:.17g},{regime},{iv.lo:.17g},{iv.hi:.17g},"
                f"{int(iv.lo_open)},{int(iv.hi_open)},{int(iv.empty)}")
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def cmd_barenblatt(args) -> int:
    params = DiffusionParams(args.gamma, args.dim)
    prof = BarenblattProfile.from_mass(params, args.mass)
    if args.radius is not None:
        r_max = args.radius
    elif args.gamma > 0:
        r_max = 1.2 * prof.support_radius(args.time)
    else:
        r_max = 6.0 * math.sqrt(2.0 * prof.profile_constant / params.alpha) \
            * args.time ** params.alpha
    r = np.linspace(0.0, r_max, args.cells)
    n = prof.density(args.time, r)
    p = prof.pressure(args.time, r)
    dp = prof.pressure_gradient(args.time, r)
    with open(args.out, "w") as fh:
        fh.write("r,n,p,dp\n")
        for row in zip(r, n, p, dp):
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")
    print(f"wrote {args.cells} rows to {args.out}")
    return 0


def cmd_rates(args) -> int:
    series = FunctionalSeries.from_csv(args.series)
    window = args.window
    if window not in (None, "default", "last_decade"):
        vals = [float(x) for x in window.split(",")]
        window = (vals[0], vals[1])
    elif window is None:
        window = "default"
    window = _resolve_window(series, window, args.model)
    result = fit_power(series, window) if args.model == "power" \
        else fit_exponential(series, window)
    line = (f"{args.model},{result.value:.17g},{result.prefactor:.17g},"
            f"{result.r2:.17g},{result.window[0]:.17g},{result.window[1]:.17g}")
    print("model,value,prefactor,r2,window_lo,window_hi")
    print(line)
    if args.out:
        new = not os.path.exists(args.out)
        with open(args.out, "a") as fh:
            if new:
                fh.write("series,model,value,prefactor,r2,window_lo,window_hi\n")
            fh.write(f"{args.series}," + line + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="difflab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="admissibility of one (gamma, b, d, potential)")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--b", type=float)
    p.add_argument("--gamma-b", type=float, dest="gamma_b")
    p.add_argument("--potential", choices=admissibility.ASSUMPTIONS, default="trivial")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("sweep", help="admissible gamma*b intervals over a gamma grid")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--potential", choices=admissibility.ASSUMPTIONS, default="trivial")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("barenblatt", help="tabulate a self-similar profile")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--time", type=float, default=1.0)
    p.add_argument("--radius", type=float)
    p.add_argument("--cells", type=int, default=512)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_barenblatt)

    p = sub.add_parser("run", help="run experiment configuration file(s)")
    p.add_argument("--config", nargs="+", required=True)
    p.add_argument("--out", default="out")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--slack", type=float, default=None,
                   help="override the slack of every bound check")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("rates", help="fit a decay model to a series CSV")
    p.add_argument("--series", required=True)
    p.add_argument("--model", choices=("power", "exponential"), required=True)
    p.add_argument("--window", help="'default', 'last_decade', or 'lo,hi'")
    p.add_argument("--out", help="append the fit as a CSV row")
    p.set_defaults(fn=cmd_rates)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, DomainError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
