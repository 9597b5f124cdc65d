"""Command line: ``arithstruct run | audit | emit``.

Exit codes: 0 when a sweep (or audit, or conversion) completes, 2 on an
invalid configuration, 3 on an I/O or other infrastructure error, 1 when
an audit finds rows that do not reproduce.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import harness as h

EXIT_OK, EXIT_AUDIT, EXIT_CONFIG, EXIT_INFRA = 0, 1, 2, 3

FLAG_FIELDS = ("experiment", "N", "p", "alpha", "k", "beta", "sigma", "epsilon0", "q", "c0", "M",
               "strategy", "out", "format")


def _parser():
    ap = argparse.ArgumentParser(prog="arithstruct", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment sweep")
    run.add_argument("--config", help="JSON config file; its keys override flags")
    run.add_argument("--suite", action="store_true", help="run every shipped default config")
    run.add_argument("--experiment", choices=h.EXPERIMENTS)
    run.add_argument("--n", dest="N", type=int)
    run.add_argument("--p", type=float)
    run.add_argument("--alpha", type=float)
    run.add_argument("--k", type=int)
    run.add_argument("--beta", type=float)
    run.add_argument("--sigma", type=float)
    run.add_argument("--epsilon0", type=float)
    run.add_argument("--q", type=float)
    run.add_argument("--c0", type=float)
    run.add_argument("--M", type=float)
    run.add_argument("--seeds", help="count n (seeds 0..n-1) or comma list")
    run.add_argument("--strategy")
    run.add_argument("--out", help="output file (or directory with --suite)")
    run.add_argument("--format", choices=("json", "csv"))
    run.add_argument("--workers", type=int, default=1)

    audit = sub.add_parser("audit", help="re-run a JSON report and compare rows")
    audit.add_argument("report")

    emit = sub.add_parser("emit", help="convert a JSON report")
    emit.add_argument("report")
    emit.add_argument("--format", choices=("json", "csv", "trace-csv"), default="csv")
    emit.add_argument("--out", required=True)
    return ap


def config_from_args(args):
    """Flags first, then JSON config keys on top."""
    data = {}
    for name in FLAG_FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            data[name] = v
    if args.seeds is not None:
        data["seeds"] = h.parse_seeds(args.seeds)
    if args.config:
        with open(args.config) as fh:
            data.update(json.load(fh))
    return h.ExperimentConfig.from_dict(data)


def _write(report, fmt, out):
    if out is None:
        text = h.report_json(report) if fmt == "json" else h.report_csv(report)
        sys.stdout.write(text)
    else:
        h.emit_report(report, fmt, out)


def _summary(name, report):
    agg = report.aggregate
    frac = agg["success_fraction"]
    frac = "n/a" if frac is None else f"{frac:.3f}"
    print(f"{name}: {agg['successes']}/{agg['trials']} successes ({frac})", file=sys.stderr)


def cmd_run(args):
    if args.suite:
        fmt = args.format or "csv"
        outdir = args.out or "reports"
        for name, cfg in h.default_suite():
            report = h.run_trials(cfg, workers=args.workers)
            stem = os.path.splitext(name)[0]
            h.emit_report(report, fmt, os.path.join(outdir, f"{stem}.{fmt}"))
            _summary(stem, report)
        return EXIT_OK
    cfg = config_from_args(args)
    report = h.run_trials(cfg, workers=args.workers)
    _write(report, cfg.format, cfg.out)
    _summary(cfg.experiment, report)
    return EXIT_OK


def cmd_audit(args):
    old = h.load_report_json(args.report)
    cfg = h.ExperimentConfig.from_dict(old.config)
    new = h.run_trials(cfg)
    cols = h.columns_for(cfg.experiment)
    bad = 0
    for a, b in zip(old.rows, new.rows):
        diff = [c for c in cols if a.get(c) != b.get(c)]
        status = "ok" if not diff else "MISMATCH " + ",".join(diff)
        if diff:
            bad += 1
        print(f"seed {a.get('seed')}: success={a.get('success')} {status}")
    if len(old.rows) != len(new.rows):
        print(f"row count differs: {len(old.rows)} vs {len(new.rows)}")
        bad += 1
    print(f"{len(old.rows) - bad}/{len(old.rows)} rows reproduced")
    return EXIT_OK if bad == 0 else EXIT_AUDIT


def cmd_emit(args):
    report = h.load_report_json(args.report)
    h.emit_report(report, args.format, args.out)
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return {"run": cmd_run, "audit": cmd_audit, "emit": cmd_emit}[args.command](args)
    except h.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFRA


if __name__ == "__main__":
    sys.exit(main())
