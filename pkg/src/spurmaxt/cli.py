"""Command-line interface: ``analyze``, ``simulate`` and ``demo``.

Exit codes: 0 success, 2 unreadable or malformed input (and usage errors),
3 validation errors, 4 numerical failures.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import os
import sys

import numpy as np

from . import correlation as corr
from . import simulation as sim
from .dataset import GroupedDataset, load_csv
from .estimators import ONE_SIDED, SIDEDNESS, TWO_SIDED, cov_tilde
from .exceptions import InputError, NumericError, SpurMaxTError, ValidationError
from .mvn import DEFAULT_DRAWS, SIMULATION_DRAWS, THREADS_ENV
from .procedures import MAXT, METHODS, NEGATIVE_CONTROLS, PROPOSAL, canonical_method, run_analysis
from .seeding import SEED_SCHEME, derive_seed, fresh_seed, rng_for

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VALIDATION = 3
EXIT_NUMERIC = 4


def _exit_code(exc):
    if isinstance(exc, InputError):
        return EXIT_INPUT
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    return EXIT_VALIDATION


@contextlib.contextmanager
def _thread_cap(threads):
    if threads is None:
        yield
        return
    old = os.environ.get(THREADS_ENV)
    os.environ[THREADS_ENV] = str(threads)
    try:
        yield
    finally:
        if old is None:
            os.environ.pop(THREADS_ENV, None)
        else:
            os.environ[THREADS_ENV] = old


def _emit(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _comment_header(config):
    return "".join(f"# {k}: {json.dumps(v)}\n" for k, v in config.items())


def _method_arg(parser, value):
    try:
        return canonical_method(value)
    except ValidationError as exc:
        parser.error(str(exc))


def _methods_arg(parser, value):
    out = []
    for name in value.split(","):
        name = name.strip()
        if not name:
            continue
        try:
            out.append(sim._sim_method(name))
        except ValidationError as exc:
            parser.error(str(exc))
    if not out:
        parser.error("--methods is empty")
    return tuple(dict.fromkeys(out))


def cmd_analyze(args, parser):
    method = _method_arg(parser, args.method)
    seed = args.seed if args.seed is not None else fresh_seed()
    ds = load_csv(args.input, delimiter=args.delimiter, group_column=args.group_column,
                  control_label=args.control_label)
    config = {
        "command": "analyze", "input": args.input, "method": method, "alpha": args.alpha,
        "sidedness": args.sidedness, "reference": args.reference, "theta": args.theta,
        "n_draws": args.draws, "seed": seed, "seed_scheme": SEED_SCHEME,
        "mvn_seed": derive_seed(seed, "mvn"), "repair_seed": derive_seed(seed, "repair"),
        "groups": list(ds.labels), "sizes": list(ds.sizes), "variables": ds.p,
    }
    with _thread_cap(args.threads):
        outcome = run_analysis(ds, method, alpha=args.alpha, sidedness=args.sidedness, theta=args.theta,
                               n_draws=args.draws, seed=seed, reference=args.reference,
                               allow_negative_control=args.allow_negative_control)
    if args.export_correlation:
        _export_correlation(ds, method, args.theta, seed, args.export_correlation)
    if args.format == "json":
        text = outcome.to_json(config) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        buf.write(_comment_header(config))
        w = csv.writer(buf, lineterminator="\n")
        for row in outcome.to_csv_rows():
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
        text = buf.getvalue()
    else:
        text = _comment_header(config) + outcome.to_text()
    _emit(text, args.output)
    return EXIT_OK


def _export_correlation(ds, method, theta, seed, path):
    repair_seed = derive_seed(seed, "repair")
    if method == PROPOSAL:
        model = corr.build_spurious(ds, theta, seed=repair_seed)
    elif method in NEGATIVE_CONTROLS:
        model = corr.build_global_pooled(ds, seed=repair_seed)
    else:
        model = corr.build_conventional(ds)
    names = [f"{ds.labels[s]}:{ds.variable_names[j]}" for s in range(1, ds.m + 1) for j in range(ds.p)]
    model.to_csv(path, names)


def _scenarios_from_args(args, parser):
    methods = _methods_arg(parser, args.methods) if args.methods else None
    reps = args.reps
    draws = args.draws
    if args.full_scale:
        reps = reps or sim.FULL_REPS
        draws = draws or sim.FULL_DRAWS
    reps = sim.DESK_REPS if reps is None else reps
    draws = SIMULATION_DRAWS if draws is None else draws
    common = {"reps": reps, "seed": args.seed, "n_draws": draws}
    if args.table1:
        scenarios = sim.table1_scenarios(**common, **({"methods": methods} if methods else {}))
    elif args.table2:
        scenarios = sim.table2_scenarios(**common, **({"methods": methods} if methods else {}))
    elif args.scenario:
        try:
            scenarios = sim.load_scenarios(args.scenario)
        except OSError as exc:
            raise InputError(f"cannot read scenario file: {exc}") from None
        for i, sc in enumerate(scenarios):
            if args.reps is not None or args.full_scale:
                sc.reps = reps
            if args.draws is not None or args.full_scale:
                sc.n_draws = draws
            if methods:
                sc.methods = methods
            sc.seed = derive_seed(args.seed, "scenario", i)
    else:
        scenarios = [sim.SimScenario(
            rho=args.rho, n=args.n, p=args.p, mu=args.mu, r=args.r, m=args.m,
            block_size=args.block_size, methods=methods or METHODS, reps=reps, n_draws=draws,
            seed=derive_seed(args.seed, "scenario", 0),
        )]
    for sc in scenarios:
        if args.sidedness:
            sc.sidedness = args.sidedness
        if args.reference:
            sc.reference = args.reference
        if args.alpha is not None:
            sc.alpha = args.alpha
        if args.theta is not None:
            sc.theta = args.theta
        sc.validate()
    return scenarios


def cmd_simulate(args, parser):
    if args.seed is None:
        args.seed = fresh_seed()
    scenarios = _scenarios_from_args(args, parser)
    reports = []
    for sc in scenarios:
        report = sim.run_scenario(sc, workers=args.threads)
        print(f"[{sc.label or 'scenario'}] {sc.reps} reps in {report.wall_time:.1f}s", file=sys.stderr)
        reports.append(report)
    config = {
        "command": "simulate",
        "preset": "table1" if args.table1 else "table2" if args.table2 else args.scenario or "custom",
        "seed": args.seed, "seed_scheme": SEED_SCHEME, "scenarios": len(scenarios),
        "reps": scenarios[0].reps, "n_draws": scenarios[0].n_draws,
        "sidedness": scenarios[0].sidedness, "reference": scenarios[0].reference,
        "alpha": scenarios[0].alpha, "methods": list(scenarios[0].methods),
    }
    if args.format == "json":
        text = sim.reports_to_json(reports, config) + "\n"
    else:
        text = _comment_header(config) + sim.reports_to_csv(reports, args.layout)
    _emit(text, args.output)
    return EXIT_OK


def fig1_dataset(n=10, mu=1.0, rho=0.0, seed=0):
    """Two groups of ``n`` bivariate Gaussian samples; the case group is shifted by ``mu``."""
    cov = np.array([[1.0, rho], [rho, 1.0]])
    chol = np.linalg.cholesky(cov)
    rng = rng_for(seed, "demo")
    control = rng.standard_normal((n, 2)) @ chol.T
    case = rng.standard_normal((n, 2)) @ chol.T + mu
    return GroupedDataset((control, case), variable_names=("y1", "y2"))


def _corr(c):
    return float(c[0, 1] / np.sqrt(c[0, 0] * c[1, 1]))


def cmd_demo(args, parser):
    seed = args.seed if args.seed is not None else fresh_seed()
    if args.negative_control:
        report = sim.corollary1_demo(n=args.n, mu2=args.mu, reps=args.reps, seed=seed,
                                     n_draws=args.draws or SIMULATION_DRAWS)
        print(f"# seed: {seed}")
        print(f"# {report.scenario['label']}, {report.reps} reps, one-sided, alpha=0.05")
        print(f"{'method':<20} {'FWER':>8} {'SE':>8}")
        for name, summ in report.methods.items():
            print(f"{name:<20} {summ.fwer:>8.4f} {summ.fwer_se:>8.4f}")
        return EXIT_OK
    ds = fig1_dataset(args.n, args.mu, args.rho, seed)
    # correlation of the pooled sample about its pooled mean
    spurious = float(np.corrcoef(np.vstack(ds.groups), rowvar=False)[0, 1])
    print(f"# seed: {seed}  n: {args.n}  shift: {args.mu}  rho: {args.rho}  seed_scheme: {SEED_SCHEME}")
    print(f"control correlation:  {_corr(cov_tilde(ds, 0)):.4f}")
    print(f"case correlation:     {_corr(cov_tilde(ds, 1)):.4f}")
    print(f"spurious correlation: {spurious:.4f}")
    draws = args.draws or DEFAULT_DRAWS
    rows = []
    for method in (MAXT, PROPOSAL):
        out = run_analysis(ds, method, alpha=0.05, sidedness=ONE_SIDED, n_draws=draws, seed=seed)
        rows.append(out)
    print(f"{'variable':<9} {'t':>8}   {'maxt adj p':>10} {'reject':>6}   {'proposal adj p':>14} {'reject':>6}")
    for a, b in zip(rows[0].hypotheses, rows[1].hypotheses):
        print(f"{a.variable:<9} {a.t:>8.4f}   {a.adjusted_p:>10.4f} {'yes' if a.rejected else 'no':>6}   "
              f"{b.adjusted_p:>14.4f} {'yes' if b.rejected else 'no':>6}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="spurmaxt", description="Many-to-one comparisons with maxT-type procedures.")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="test every case group against the control")
    a.add_argument("--input", required=True, help="CSV with a group column and one column per variable")
    a.add_argument("--method", default=PROPOSAL,
                   help=f"one of {', '.join(METHODS)} (or {', '.join(NEGATIVE_CONTROLS)} with --allow-negative-control)")
    a.add_argument("--alpha", type=float, default=0.05)
    a.add_argument("--sidedness", choices=SIDEDNESS, default=TWO_SIDED)
    a.add_argument("--reference", choices=("normal", "t"), default="normal",
                   help="marginal calibration of the statistics")
    a.add_argument("--theta", type=float, default=1.0)
    a.add_argument("--draws", type=int, default=DEFAULT_DRAWS, help="Monte Carlo draws")
    a.add_argument("--seed", type=int, help="run seed (drawn at random and echoed if omitted)")
    a.add_argument("--format", choices=("json", "csv", "text"), default="json")
    a.add_argument("--output", help="output path (default stdout)")
    a.add_argument("--delimiter", default=",")
    a.add_argument("--group-column", default="group")
    a.add_argument("--control-label", type=int, default=0)
    a.add_argument("--threads", type=int)
    a.add_argument("--allow-negative-control", action="store_true")
    a.add_argument("--export-correlation", metavar="PATH", help="write the correlation model as CSV")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="FWER and power simulations")
    grid = s.add_mutually_exclusive_group()
    grid.add_argument("--table1", action="store_true", help="20-setting FWER grid")
    grid.add_argument("--table2", action="store_true", help="16-setting power grid")
    grid.add_argument("--scenario", metavar="JSON", help="scenario file")
    s.add_argument("--rho", type=float, default=0.3)
    s.add_argument("--n", type=int, default=12)
    s.add_argument("--p", type=int, default=50)
    s.add_argument("--mu", type=float, default=0.0)
    s.add_argument("--r", type=float, default=0.0)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--block-size", type=int, default=10)
    s.add_argument("--reps", type=int)
    s.add_argument("--draws", type=int)
    s.add_argument("--methods", help="comma-separated subset, e.g. bon,maxt")
    s.add_argument("--alpha", type=float)
    s.add_argument("--theta", type=float)
    s.add_argument("--sidedness", choices=SIDEDNESS)
    s.add_argument("--reference", choices=("normal", "t"))
    s.add_argument("--seed", type=int)
    s.add_argument("--full-scale", action="store_true", help=f"{sim.FULL_REPS} reps and {sim.FULL_DRAWS} draws")
    s.add_argument("--threads", type=int, help="worker processes (results do not depend on it)")
    s.add_argument("--layout", choices=("wide", "long"), default="wide")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--output")
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("demo", help="two-variable example contrasting maxT and Proposal")
    d.add_argument("--n", type=int, default=10)
    d.add_argument("--mu", type=float, default=1.0)
    d.add_argument("--rho", type=float, default=0.0)
    d.add_argument("--seed", type=int)
    d.add_argument("--draws", type=int)
    d.add_argument("--negative-control", action="store_true",
                   help="three-group simulation where the globally pooled model loses FWER control")
    d.add_argument("--reps", type=int, default=2000)
    d.set_defaults(func=cmd_demo)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except SpurMaxTError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
