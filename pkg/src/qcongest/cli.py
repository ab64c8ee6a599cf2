"""Command-line entry point: ``qcongest {run,sweep,validate,fit}``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness.config import PROTOCOLS, ConfigError, SweepConfig, check_sweep, load_config, parse_expression
from .harness.fit import fit_scaling
from .harness.plot import write_svg
from .harness.records import read_csv, to_csv, write_csv
from .harness.sweep import output_path, run_sweep, with_overrides
from .harness.validate import SUITES, validate
from .netmodel import ContractError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _expr(text: str) -> str:
    try:
        parse_expression(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _tau(text: str) -> str:
    if text == "auto":
        return text
    if text.isdigit() and int(text) >= 1:
        return text
    raise argparse.ArgumentTypeError("tau must be 'auto' or a positive integer")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcongest", description="Quantum CONGEST protocol simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run trials of one protocol at one size")
    run.add_argument("--protocol", required=True, choices=PROTOCOLS)
    run.add_argument("--n", type=int, required=True)
    run.add_argument("--trials", type=int, default=1)
    run.add_argument("--k", type=_expr, help="expression in n (and tau)")
    run.add_argument("--eps", type=_expr)
    run.add_argument("--gamma", type=_expr, default="0")
    run.add_argument("--tau", type=_tau, default="auto")
    run.add_argument("--graph", help="graph family (defaults per protocol)")
    run.add_argument("--inputs", default="half", help="agreement inputs: half, zeros, ones, random")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", help="CSV path (stdout if omitted)")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--timing", action="store_true", help="fill the wall_ms column")

    sw = sub.add_parser("sweep", help="run every [sweep] section of a config file")
    sw.add_argument("--config", required=True)
    sw.add_argument("--trials", type=int)
    sw.add_argument("--seed", type=int)
    sw.add_argument("--out")
    sw.add_argument("--workers", type=int)
    sw.add_argument("--timing", action="store_true", default=None)

    va = sub.add_parser("validate", help="run a validation suite")
    va.add_argument("--suite", required=True, choices=SUITES)
    va.add_argument("--report", help="write the JSON report here (stdout otherwise)")

    fi = sub.add_parser("fit", help="log-log scaling fit of a CSV column")
    fi.add_argument("--csv", required=True)
    fi.add_argument("--column", default="total_msgs")
    fi.add_argument("--plot", help="SVG output path")
    return ap


def _progress(n, batch) -> None:
    ok = sum(r.valid for r in batch)
    print(f"n={n}: {ok}/{len(batch)} valid", file=sys.stderr)


def cmd_run(args) -> int:
    cfg = SweepConfig(
        name="sweep", protocol=args.protocol, ns=[args.n], trials=args.trials, seed=args.seed,
        out=args.out, graph=args.graph, k=args.k, tau=args.tau, eps=args.eps, gamma=args.gamma,
        inputs=args.inputs, workers=args.workers, timing=args.timing,
    )
    check_sweep(cfg)
    records = run_sweep(cfg, write=False)
    if args.out:
        write_csv(records, args.out)
    else:
        sys.stdout.write(to_csv(records))
    return EXIT_OK


def cmd_sweep(args) -> int:
    for cfg in load_config(args.config):
        cfg = with_overrides(
            cfg, trials=args.trials, seed=args.seed, workers=args.workers, timing=args.timing,
            out=output_path(cfg, args.out) if args.out else None,
        )
        check_sweep(cfg)
        print(f"[{cfg.name}] {cfg.protocol} n={cfg.ns} trials={cfg.trials}", file=sys.stderr)
        records = run_sweep(cfg, progress=_progress)
        if not cfg.out:
            sys.stdout.write(to_csv(records))
        if cfg.plot and len({r.n for r in records}) >= 3:
            fit = fit_scaling(records, "total_msgs")
            write_svg(fit, cfg.plot, [(r.n, r.total_msgs) for r in records], f"{cfg.protocol}")
    return EXIT_OK


def cmd_validate(args) -> int:
    report = validate(args.suite)
    text = json.dumps(report.as_dict(), indent=2)
    if args.report:
        Path(args.report).write_text(text + "\n")
    else:
        print(text)
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_fit(args) -> int:
    records = read_csv(args.csv)
    fit = fit_scaling(records, args.column)
    print(json.dumps(fit.as_dict(), indent=2))
    if args.plot:
        samples = [(r.n, float(getattr(r, args.column))) for r in records]
        write_svg(fit, args.plot, samples, Path(args.csv).stem)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "validate": cmd_validate, "fit": cmd_fit}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ContractError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
