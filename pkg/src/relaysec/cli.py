"""Command-line front end for the simulation harness.

Three subcommands: `run` executes the configured campaign, `sweep` is run
with the sweep axis/values overridden from the command line, and
`convergence` emits per-outer-iteration rate traces of the alternating
scheme.  Exit codes: 0 when every record ended optimal or zero-rate, 1
when any record carries a failure status, 2 for usage or config errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import harness


def _add_common(p: argparse.ArgumentParser, out_required: bool = True) -> None:
    p.add_argument("--config", required=True, metavar="FILE",
                   help="JSON experiment config")
    p.add_argument("--out", required=out_required, metavar="FILE",
                   help="output path" + ("" if out_required else " (default: stdout)"))
    p.add_argument("--threads", type=int, default=1, metavar="N",
                   help="parallel realizations (default 1)")
    p.add_argument("--seed", type=int, default=None, metavar="S",
                   help="override master_seed from the config")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaysec",
        description="Monte Carlo secrecy-rate experiments for wireless-powered "
                    "AF relays with cooperative jamming.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the campaign described by the config")
    _add_common(p_run)
    p_run.add_argument("--format", choices=("csv", "json-lines"), default="csv")

    p_sweep = sub.add_parser("sweep", help="run with the sweep axis/values overridden")
    _add_common(p_sweep)
    p_sweep.add_argument("--format", choices=("csv", "json-lines"), default="csv")
    p_sweep.add_argument("--axis", required=True, choices=("N", "K", "Ps"))
    p_sweep.add_argument("--values", required=True, metavar="a,b,c",
                         help="comma-separated sweep values")
    p_conv = sub.add_parser("convergence",
                            help="emit per-outer-iteration rate traces")
    _add_common(p_conv, out_required=False)
    return parser


def _sweep_override(cfg, axis: str, raw: str):
    axis = "Ps_dBm" if axis == "Ps" else axis
    parts = [s.strip() for s in raw.split(",") if s.strip()]
    if not parts:
        raise ValueError("--values must list at least one value")
    cast = int if axis in ("N", "K") else float
    values = tuple(cast(s) for s in parts)
    return replace(cfg, sweep_axis=axis, sweep_values=values)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = harness.ExperimentConfig.from_json(args.config)
        if args.seed is not None:
            cfg = replace(cfg, master_seed=args.seed)
        if args.command == "sweep":
            cfg = _sweep_override(cfg, args.axis, args.values)
    except (ValueError, TypeError, OSError) as exc:
        print(f"relaysec: config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "convergence":
        rows = harness.run_convergence(cfg, threads=args.threads)
        if args.out is None:
            sys.stdout.write(harness.TRACE_HEADER + "\n")
            for rid, sid, it, rate in rows:
                sys.stdout.write(f"{rid},{sid},{it},{rate:.17e}\n")
        else:
            harness.write_trace(rows, args.out)
            print(f"wrote {len(rows)} trace rows to {args.out}", file=sys.stderr)
        return 0

    records = harness.run_experiment(cfg, threads=args.threads)
    harness.write_results(records, args.out, format=args.format)
    failed = [r for r in records if r.status not in ("optimal", "zero-rate")]
    print(f"wrote {len(records)} records to {args.out}"
          + (f"; {len(failed)} failed" if failed else ""), file=sys.stderr)
    if failed:
        worst = failed[0]
        print(f"first failure: scheme={worst.scheme} realization={worst.realization_id} "
              f"status={worst.status}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
