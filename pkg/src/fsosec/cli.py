"""Command-line front end.

Three subcommands: ``link-budget`` prints the deterministic budget
per sweep point, ``metrics`` evaluates the secrecy metrics for every
requested method, ``validate`` cross-checks the analytic methods
against Monte Carlo and fails on any z-score above three.

Output is CSV with a header row; numbers below 1e-3 in magnitude are
forced to scientific notation so spreadsheet locale guessing never
bites.  A run manifest (config digest, seed, versions) goes next to
every file written, named ``<out>.manifest.json``.  All output is a
pure function of configuration plus seed: the same invocation gives
byte-identical files.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical non-convergence.
"""

import argparse
import hashlib
import json
import math
import platform
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import build_scenario, link_state, parse_config, parse_methods
from .errors import ConfigError, NonConvergent, PoleCollision
from .mc import McConfig, mc_asc, mc_sop, mc_spsc
from .secrecy import (asc_closed_form, asc_quadrature, sop_exact,
                      sop_lower_bound, spsc)

_EXIT_OK = 0
_EXIT_VALIDATION = 1
_EXIT_CONFIG = 2
_EXIT_NUMERICS = 3

_BUDGET_COLUMNS = ("path_length_m", "atmospheric_gain", "pointing_gain_bob",
                   "pointing_gain_eve", "cloud_gain", "mean_snr_bob",
                   "mean_snr_eve", "rytov_variance", "shape_a", "shape_b")


def fmt_number(x):
    """Deterministic CSV cell for a float."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x != 0.0 and abs(x) >= 1e-3:
        return repr(x)
    return f"{x:e}"


def _sweep_points(rc):
    """(coordinate string, per-point config) pairs; one entry if unswept."""
    if rc.sweep is None:
        return [("", rc)]
    out = []
    for coord, raw in rc.sweep.points():
        out.append((fmt_number(coord), rc.with_value(rc.sweep.variable, raw)))
    return out


def _map_points(items, worker, jobs):
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, items))
    return [worker(item) for item in items]


def _analytic_rows(scenario, method):
    if method == "quadrature":
        return [asc_quadrature(scenario), sop_exact(scenario),
                sop_lower_bound(scenario, method="quadrature"),
                spsc(scenario, method="quadrature")]
    return [asc_closed_form(scenario),
            sop_lower_bound(scenario, method="closed_form"),
            spsc(scenario, method="closed_form")]


def _mc_rows(scenario, cfg):
    return [("asc", mc_asc(scenario, cfg)),
            ("sop", mc_sop(scenario, cfg)),
            ("spsc", mc_spsc(scenario, cfg))]


def _metric_rows_for_point(coord, rc, methods, jobs_inside):
    """All CSV rows of one sweep point; failures become status rows."""
    rows = []
    try:
        scenario = build_scenario(rc)
    except NonConvergent:
        for method in methods:
            rows.append((coord, "all", method, "", "", "non_convergent"))
        return rows
    for method in methods:
        try:
            if method == "monte_carlo":
                cfg = McConfig(samples=rc.mc_samples, seed=rc.mc_seed,
                               jobs=jobs_inside, batch_size=rc.mc_batch_size)
                for name, est in _mc_rows(scenario, cfg):
                    rows.append((coord, name, method, fmt_number(est.mean),
                                 fmt_number(est.std_error), "ok"))
            else:
                for mv in _analytic_rows(scenario, method):
                    rows.append((coord, mv.metric, mv.method,
                                 fmt_number(mv.value), fmt_number(mv.error),
                                 "ok"))
        except PoleCollision:
            rows.append((coord, "all", method, "", "", "pole_collision"))
        except NonConvergent:
            rows.append((coord, "all", method, "", "", "non_convergent"))
    return rows


def cmd_metrics(rc, methods, jobs, gnuplot=False):
    """Rows for every sweep point and method; (text, worst status)."""
    points = _sweep_points(rc)
    jobs_inside = 1 if (jobs > 1 and len(points) > 1) else jobs

    def worker(item):
        coord, rc_point = item
        return _metric_rows_for_point(coord, rc_point, methods, jobs_inside)

    per_point = _map_points(points, worker, jobs)
    rows = [row for chunk in per_point for row in chunk]
    failed = any(row[5] != "ok" for row in rows)
    if gnuplot:
        text = _gnuplot_table(rows)
    else:
        lines = ["sweep_value,metric,method,value,error,status"]
        lines += [",".join(row) for row in rows]
        text = "\n".join(lines) + "\n"
    return text, failed


def _gnuplot_table(rows):
    """Wide whitespace-separated layout, one column per metric/method."""
    columns = []
    for _, metric, method, _, _, _ in rows:
        name = f"{metric}:{method}"
        if metric != "all" and name not in columns:
            columns.append(name)
    coords = []
    table = {}
    for coord, metric, method, value, _, status in rows:
        if coord not in table:
            coords.append(coord)
            table[coord] = {}
        if metric != "all" and status == "ok":
            table[coord][f"{metric}:{method}"] = value
    lines = ["# sweep_value " + " ".join(columns)]
    for coord in coords:
        cells = [table[coord].get(name, "nan") for name in columns]
        lines.append(" ".join([coord if coord else "0"] + cells))
    return "\n".join(lines) + "\n"


def cmd_link_budget(rc, jobs):
    """Deterministic budget table text over the sweep."""

    def worker(item):
        coord, rc_point = item
        state = link_state(rc_point)
        return (coord,) + tuple(
            fmt_number(getattr(state, name)) for name in _BUDGET_COLUMNS)

    rows = _map_points(_sweep_points(rc), worker, jobs)
    lines = ["sweep_value," + ",".join(_BUDGET_COLUMNS)]
    lines += [",".join(row) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_validate(rc, methods, jobs):
    """Analytic-vs-MC z-score table; (text, any_fail, any_nonconvergent).

    Pairs each analytic estimate with the Monte Carlo estimate of the
    same metric.  The outage lower bound has no Monte Carlo
    counterpart (the sampler estimates the true outage), so it is
    skipped; at zero target rate the bound is exact and enters
    through spsc anyway.
    """
    analytic = [m for m in methods if m != "monte_carlo"]
    points = _sweep_points(rc)
    jobs_inside = 1 if (jobs > 1 and len(points) > 1) else jobs

    def worker(item):
        coord, rc_point = item
        out = []
        try:
            scenario = build_scenario(rc_point)
        except NonConvergent:
            return [(coord, "all", "all", "", "", "", "", "non_convergent")]
        cfg = McConfig(samples=rc_point.mc_samples, seed=rc_point.mc_seed,
                       jobs=jobs_inside, batch_size=rc_point.mc_batch_size)
        reference = dict(_mc_rows(scenario, cfg))
        for method in analytic:
            try:
                for mv in _analytic_rows(scenario, method):
                    if mv.metric not in reference:
                        continue
                    est = reference[mv.metric]
                    diff = mv.value - est.mean
                    if est.std_error > 0.0:
                        z = diff / est.std_error
                    else:
                        # a degenerate sample (all batches identical, e.g.
                        # zero outage events) has no usable std error; score
                        # against the rule-of-three bound 3/n instead
                        z = diff * est.n
                    verdict = "pass" if abs(z) <= 3.0 else "fail"
                    out.append((coord, mv.metric, mv.method,
                                fmt_number(mv.value), fmt_number(est.mean),
                                fmt_number(est.std_error), fmt_number(z),
                                verdict))
            except (NonConvergent, PoleCollision):
                out.append((coord, "all", method, "", "", "", "",
                            "non_convergent"))
        return out

    per_point = _map_points(points, worker, jobs)
    rows = [row for chunk in per_point for row in chunk]
    lines = ["sweep_value,metric,method,analytic,mc_mean,mc_std_error,"
             "z_score,status"]
    lines += [",".join(row) for row in rows]
    text = "\n".join(lines) + "\n"
    any_fail = any(row[7] == "fail" for row in rows)
    any_nonconv = any(row[7] == "non_convergent" for row in rows)
    return text, any_fail, any_nonconv


def _manifest(rc, args, command, out_path):
    digest = hashlib.sha256(open(args.config, "rb").read()).hexdigest()
    return json.dumps({
        "command": command,
        "config": args.config,
        "config_sha256": digest,
        "jobs": args.jobs,
        "methods": list(_resolved_methods(rc, args)),
        "mc_samples": rc.mc_samples,
        "numpy_version": np.__version__,
        "output": out_path,
        "python_version": platform.python_version(),
        "seed": rc.mc_seed,
        "version": __version__,
    }, sort_keys=True, indent=2) + "\n"


def _resolved_methods(rc, args):
    if getattr(args, "methods", None):
        return parse_methods(args.methods, "--methods")
    return rc.methods


def _write(text, out_path, manifest_text=None):
    if out_path is None:
        sys.stdout.write(text)
        return
    with open(out_path, "w", newline="") as fh:
        fh.write(text)
    if manifest_text is not None:
        with open(out_path + ".manifest.json", "w", newline="") as fh:
            fh.write(manifest_text)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fsosec",
        description="Secrecy metrics of a satellite-to-ground optical "
                    "downlink against a co-located eavesdropper.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (("link-budget", "deterministic gains and mean SNR"),
                      ("metrics", "secrecy metrics per sweep point"),
                      ("validate", "analytic vs Monte Carlo z-scores")):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int, help="override the MC seed")
        p.add_argument("--methods",
                       help="comma-separated subset of quadrature, "
                            "closed_form, monte_carlo")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker threads (default 1)")
        if name == "metrics":
            p.add_argument("--gnuplot", action="store_true",
                           help="wide whitespace table instead of CSV")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        rc = parse_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be >= 0")
            rc = _replace_seed(rc, args.seed)
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        methods = _resolved_methods(rc, args)
        out_path = args.out if args.out is not None else rc.output

        if args.command == "link-budget":
            text = cmd_link_budget(rc, args.jobs)
            _write(text, out_path, _manifest(rc, args, args.command, out_path))
            return _EXIT_OK
        if args.command == "metrics":
            text, failed = cmd_metrics(rc, methods, args.jobs,
                                       gnuplot=args.gnuplot)
            _write(text, out_path, _manifest(rc, args, args.command, out_path))
            return _EXIT_NUMERICS if failed else _EXIT_OK
        if "monte_carlo" not in methods or len(methods) < 2:
            raise ConfigError("validate needs monte_carlo plus at least "
                              "one analytic method")
        text, any_fail, any_nonconv = cmd_validate(rc, methods, args.jobs)
        _write(text, out_path, _manifest(rc, args, args.command, out_path))
        if any_nonconv:
            return _EXIT_NUMERICS
        if any_fail:
            return _EXIT_VALIDATION
        return _EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except (NonConvergent, PoleCollision) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return _EXIT_NUMERICS


def _replace_seed(rc, seed):
    from dataclasses import replace
    return replace(rc, mc_seed=seed)


if __name__ == "__main__":
    sys.exit(main())
