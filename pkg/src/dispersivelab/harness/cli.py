"""Command-line driver: one subcommand per suite.

    dispersivelab <suite> [--config cfg.toml] [--out dir]
                          [--seed N] [--jobs N]

Writes <suite>_results.csv, <suite>_summary.json and the suite's plot
tables into the output directory, prints one verdict line per case, and
exits 0 only if every verdict is PASS (2 on a configuration error).
"""

from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError
from .config import KINDS, default_config, load_config, with_overrides
from .records import write_record
from .suites import SUITES


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dispersivelab",
        description="Run one numerical-verification suite and persist "
                    "its result record.")
    sub = parser.add_subparsers(dest="kind", required=True)
    helps = {
        "decay": "endpoint kernel decay rates",
        "strichartz": "flow/data ratios and dyadic-rescale invariance",
        "wellposed": "fixed-point contraction and horizon scaling",
        "dunkl": "weighted radial transform and oscillatory decay",
        "admissible": "exponent-region lattices and scaling round trips",
    }
    for kind in KINDS:
        p = sub.add_parser(kind, help=helps[kind])
        p.add_argument("--config", metavar="PATH",
                       help="TOML experiment config (defaults built in)")
        p.add_argument("--out", metavar="DIR",
                       help="output directory (default: config outdir)")
        p.add_argument("--seed", type=int, metavar="U64",
                       help="override the config seed")
        p.add_argument("--jobs", type=int, default=1, metavar="N",
                       help="worker threads across cases (default 1)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = load_config(args.config, kind=args.kind)
        else:
            cfg = default_config(args.kind)
        cfg = with_overrides(cfg, seed=args.seed, outdir=args.out)
        if args.jobs is not None and args.jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
        record = SUITES[cfg.kind](cfg, jobs=args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    written = write_record(record, cfg.outdir)
    for case in record.cases:
        print(f"{case.verdict}  {case.id}: measured={case.measured} "
              f"predicted={case.predicted}")
    n_fail = len(record.failures())
    status = "all passed" if n_fail == 0 else f"{n_fail} FAILED"
    print(f"{record.suite}: {len(record.cases)} cases, {status} "
          f"[config {record.config_hash}, {record.wall_clock_s}s]")
    print(f"results: {written['results']}")
    return 0 if record.all_passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
