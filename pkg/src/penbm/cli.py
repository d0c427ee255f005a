"""Batch front-end: run verification suites and write CSV reports.

Subcommands::

    penbm list                      catalog of suites
    penbm describe SUITE            suite documentation and parameters
    penbm verify --suite S --seed N run one suite with default parameters
    penbm run --config FILE         run the experiment a config file describes

Flags ``--seed --workers --out --suite --config`` can also be supplied via
environment variables with the ``PENBM_`` prefix (PENBM_SEED, ...).  Exit
status is 0 iff every check in the run passed.  CSV rows carry the schema
(name, t, estimate, se, target, margin, pass, seed, wall_ms); wall_ms is
written as 0 unless --timings is given, so reruns with the same seed are
byte-identical by default.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import env_override, load_config
from .errors import ConfigError, PenbmError
from .suites import describe, list_suites, run_suite

CSV_COLUMNS = ("name", "t", "estimate", "se", "target", "margin", "pass", "seed", "wall_ms")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def write_csv(reports, path: str, timings: bool = False):
    rows = [",".join(CSV_COLUMNS)]
    for r in reports:
        rows.append(
            ",".join(
                [
                    r.name,
                    _fmt(r.t),
                    _fmt(r.estimate),
                    _fmt(r.se),
                    _fmt(r.target),
                    _fmt(r.margin if r.margin is not None else r.p_value),
                    _fmt(r.passed),
                    _fmt(r.seed),
                    _fmt(r.wall_ms if timings else 0),
                ]
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")


def _execute(suite, seed, params, workers, out_dir, timings):
    os.makedirs(out_dir, exist_ok=True)
    reports = run_suite(suite, seed, params=params, workers=workers)
    path = os.path.join(out_dir, f"{suite}.csv")
    write_csv(reports, path, timings=timings)
    n_fail = sum(not r.passed for r in reports)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        extra = f" t={_fmt(r.t)}" if r.t is not None else ""
        est = f" est={_fmt(r.estimate)}" if r.estimate is not None else ""
        tgt = f" target={_fmt(r.target)}" if r.target is not None else ""
        print(f"[{status}] {r.name}{extra}{est}{tgt}")
    print(f"{len(reports) - n_fail}/{len(reports)} checks passed; report: {path}")
    return 0 if n_fail == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="penbm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the experiment described by a config file")
    p_run.add_argument("--config", default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--workers", type=int, default=None)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--suite", default=None)
    p_run.add_argument("--timings", action="store_true", help="record wall-clock times in the CSV")

    p_verify = sub.add_parser("verify", help="run a named suite with default parameters")
    p_verify.add_argument("--suite", default=None)
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--workers", type=int, default=None)
    p_verify.add_argument("--out", default=None)
    p_verify.add_argument("--timings", action="store_true")

    sub.add_parser("list", help="list available suites")

    p_desc = sub.add_parser("describe", help="describe a suite")
    p_desc.add_argument("suite")

    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            for name in list_suites():
                print(name)
            return 0
        if args.command == "describe":
            print(describe(args.suite))
            return 0
        if args.command == "run":
            cfg_path = env_override("config", args.config)
            if not cfg_path:
                raise ConfigError("run needs --config (or PENBM_CONFIG)")
            cfg = load_config(cfg_path)
            suite = env_override("suite", args.suite or cfg.suite)
            seed = args.seed if args.seed is not None else env_override("seed", cfg.seed)
            workers = args.workers if args.workers is not None else env_override("workers", cfg.workers)
            out_dir = args.out or env_override("out", cfg.out_dir)
            return _execute(suite, seed, cfg.suite_params(), workers, out_dir, args.timings)
        if args.command == "verify":
            suite = env_override("suite", args.suite)
            if not suite:
                raise ConfigError("verify needs --suite (or PENBM_SUITE)")
            seed = args.seed if args.seed is not None else env_override("seed", None)
            if seed is None:
                raise ConfigError("seed is mandatory (no wall-clock default); pass --seed")
            workers = args.workers if args.workers is not None else env_override("workers", 1)
            out_dir = args.out or env_override("out", "reports")
            return _execute(suite, int(seed), {}, int(workers), out_dir, args.timings)
    except PenbmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
