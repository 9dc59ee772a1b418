"""Command-line front end.

Exit codes: 0 ran (no rejection), 2 at least one test rejected H0, 1 error.
Errors print one line ``error: CODE: message`` to stderr.
"""

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .dataio import load_config, read_dataset, result_row, write_dataset, write_results
from .diagnostics import durbin_watson, portmanteau_test, t_tau_test
from .errors import SerialCorrError
from .linalg import compute_residual_maker
from .montecarlo import SimulationScenario, null_distribution_study, run_scenario, simulate_dataset

logger = logging.getLogger("serialcorr")

EXIT_OK, EXIT_ERROR, EXIT_REJECT = 0, 1, 2
WORKERS_ENV = "SERIALCORR_WORKERS"


def _default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _nu4_arg(text):
    if text == "estimate":
        return None
    if text == "gaussian":
        return 0.0
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'estimate', 'gaussian' or a number") from None


def _report_csv(reports, fh):
    cols = ["kind", "tau_or_q", "statistic", "p_value", "alpha", "reject", "sigma2_hat",
            "nu4_hat", "nu4_clamped"]
    w = csv.writer(fh)
    w.writerow(cols)
    for r in reports:
        d = r.to_dict()
        w.writerow(["" if d[c] is None else (repr(d[c]) if isinstance(d[c], float) else d[c])
                    for c in cols])


def cmd_test(args):
    if args.tau is None and args.portmanteau is None and not args.dw:
        raise SystemExit("error: USAGE: give --tau, --portmanteau or --dw")
    data = read_dataset(args.dataset)
    rm = compute_residual_maker(data.x)
    reports = []
    common = dict(alpha=args.alpha, nu4=args.nu4, robust=args.robust, rm=rm,
                  check_ratio=not args.no_lag_check)
    if args.tau is not None:
        reports.append(t_tau_test(data, args.tau, variance_mode=args.variance, **common))
    if args.portmanteau is not None:
        reports.append(portmanteau_test(data, args.portmanteau, **common))
    if args.dw:
        reports.append(durbin_watson(rm.residuals(data.y)))
    if args.csv:
        _report_csv(reports, sys.stdout)
    else:
        docs = [r.to_dict() for r in reports]
        json.dump(docs[0] if len(docs) == 1 else docs, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return EXIT_REJECT if any(r.reject for r in reports) else EXIT_OK


def cmd_simulate(args):
    cfg = load_config(args.config, seed=args.seed, replications=args.reps)
    workers = args.workers or cfg.workers or _default_workers()
    out = args.out or cfg.out
    rows = []
    for i, (s, ref) in enumerate(zip(cfg.scenarios, cfg.references)):
        try:
            res = run_scenario(s, workers=workers)
        except SerialCorrError as exc:
            logger.error("[%d/%d] %s failed: %s", i + 1, len(cfg.scenarios), s.name, exc)
            rows.append(result_row(s, ref, status=exc.code))
            continue
        logger.info("[%d/%d] %s rate=%.4f se=%.4f (%.1fs)", i + 1, len(cfg.scenarios), s.name,
                    res.rejection_rate, res.mc_std_error, res.elapsed)
        rows.append(result_row(res, ref))
    if out:
        write_results(out, rows)
    else:
        json.dump({"results": rows}, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return EXIT_OK


def _stat_arg(values):
    kind, lag = values
    if kind not in ("tau", "portmanteau"):
        raise SystemExit("error: USAGE: --stat takes 'tau K' or 'portmanteau Q'")
    return kind, int(lag)


def cmd_nulldist(args):
    kind, lag = _stat_arg(args.stat)
    if args.n - args.p < 2 * lag + 2:
        raise SystemExit(f"error: USAGE: need n - p >= 2*lag + 2, got n - p = {args.n - args.p}")
    s = SimulationScenario(
        n=args.n, p=args.p, f=args.p // 2 if args.f is None else args.f, law=args.law,
        tau=lag if kind == "tau" else 1, q=lag if kind == "portmanteau" else 0,
        replications=args.reps, master_seed=args.seed, nu4=args.nu4, name="nulldist",
    )
    res = null_distribution_study(s, workers=args.workers or _default_workers())
    if args.out:
        np.savetxt(args.out, res.statistics, fmt="%.17g")
    summary = {
        "stat": kind, "lag": lag, "n": s.n, "p": s.p, "f": s.f, "law": s.law,
        "replications": s.replications, "errors": res.errors,
        "ks_statistic": res.ks_statistic, "ks_pvalue": res.ks_pvalue,
        "normal_at_0.01": bool(res.ks_pvalue > 0.01),
    }
    json.dump(summary, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_gen_data(args):
    s = SimulationScenario(n=args.n, p=args.p, f=args.p // 2 if args.f is None else args.f,
                           law=args.law, ar=tuple(args.ar), replications=args.index + 1,
                           master_seed=args.seed, beta=args.beta)
    y, x = simulate_dataset(s, args.index)
    write_dataset(args.out, y, x)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="serialcorr", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="run serial-correlation tests on a CSV dataset")
    t.add_argument("dataset")
    which = t.add_mutually_exclusive_group()
    which.add_argument("--tau", type=int, help="lag for the single-lag test")
    which.add_argument("--portmanteau", type=int, metavar="Q", help="max lag for the portmanteau test")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--nu4", type=_nu4_arg, default=None, metavar="{estimate|gaussian|VALUE}")
    t.add_argument("--variance", choices=("exact", "shortcut"), default="exact")
    t.add_argument("--robust", action="store_true", help="use leverage-standardized residuals")
    t.add_argument("--dw", action="store_true", help="also report Durbin-Watson d")
    t.add_argument("--no-lag-check", action="store_true", help="allow lags >= (n - p)/2")
    fmt = t.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True)
    fmt.add_argument("--csv", action="store_true")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", help="run a batch of Monte Carlo scenarios from a TOML config")
    s.add_argument("config", help="path to a TOML config or the name of a bundled one")
    s.add_argument("--seed", type=int)
    s.add_argument("--reps", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--out", help="results file (.csv or .json); stdout JSON if omitted")
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("nulldist", help="sample a statistic under the null and KS-test it against N(0,1)")
    d.add_argument("--stat", nargs=2, required=True, metavar=("KIND", "LAG"))
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--p", type=int, required=True)
    d.add_argument("--f", type=int)
    d.add_argument("--law", default="normal", choices=("normal", "uniform", "gamma"))
    d.add_argument("--nu4", type=_nu4_arg, default=None)
    d.add_argument("--reps", type=int, default=10_000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--workers", type=int)
    d.add_argument("--out", help="file for the statistic sample, one value per line")
    d.set_defaults(func=cmd_nulldist)

    g = sub.add_parser("gen-data", help="export one simulated dataset as CSV")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--f", type=int)
    g.add_argument("--law", default="normal", choices=("normal", "uniform", "gamma"))
    g.add_argument("--ar", type=float, nargs="*", default=[])
    g.add_argument("--beta", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--index", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_data)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    logger.propagate = False
    try:
        return args.func(args)
    except SerialCorrError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
