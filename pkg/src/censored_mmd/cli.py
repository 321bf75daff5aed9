"""Command-line front end: test a dataset, simulate, calibrate, or run a grid."""

from __future__ import annotations

import argparse
import sys

from .data import read_dataset_csv, write_dataset_csv
from .errors import CensoredMMDError
from .harness import (
    ALL_TESTS,
    config_from_mapping,
    emit_table,
    load_config,
    null_model_from_hazard,
    parse_lengthscale,
    run_experiment,
    run_single_test,
)
from .mmd import TestOutcome
from .rng import substream
from .simulate import calibrate_censoring, parse_censoring, parse_hazard, sample_dataset


def _add_test_parser(sub):
    p = sub.add_parser("test", help="run one test on a dataset CSV")
    p.add_argument("--data", required=True, help="CSV file with header time,event")
    p.add_argument("--null", default="constant:1", help="null model label (default constant:1)")
    p.add_argument("--test", required=True, choices=ALL_TESTS)
    p.add_argument("--levels", default="0.05", help="comma-separated significance levels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--boot", type=int, default=500, help="bootstrap resamples")
    p.add_argument("--lengthscale", default="fixed:1", help="fixed:<l> or median")
    p.add_argument("--exit-code-signal", action="store_true",
                   help="exit with status 2 when rejecting at the first level")


def _add_simulate_parser(sub):
    p = sub.add_parser("simulate", help="draw a censored dataset and write it as CSV")
    p.add_argument("--model", required=True, help="hazard label, e.g. weibull:3,1")
    p.add_argument("--censoring", required=True, help="rate:<gamma> or target:<fraction>")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="output path, or - for stdout")


def _add_calibrate_parser(sub):
    p = sub.add_parser("calibrate", help="censoring rate for a target censored fraction")
    p.add_argument("--model", required=True, help="hazard label")
    p.add_argument("--target", type=float, required=True, help="censored fraction in (0,1)")


def _add_experiment_parser(sub):
    p = sub.add_parser("experiment", help="run a Monte-Carlo grid from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--boot", type=int, default=None)
    p.add_argument("--lengthscale", default=None)
    p.add_argument("--tests", default=None, help="comma-separated subset of tests")
    p.add_argument("--out", default="-", help="output CSV path, or - for stdout")


def _cmd_test(args) -> int:
    dataset = read_dataset_csv(args.data)
    levels = tuple(float(a) for a in args.levels.split(","))
    outcome = run_single_test(
        dataset,
        null_model_from_hazard(parse_hazard(args.null)),
        args.test,
        levels=levels,
        n_boot=args.boot,
        seed=args.seed,
        lengthscale=parse_lengthscale(args.lengthscale),
    )
    print(f"test: {args.test}")
    print(f"statistic: {outcome.statistic:.10g}")
    if isinstance(outcome, TestOutcome):
        print(f"u_statistic: {outcome.u_statistic:.10g}")
        print(f"lengthscale: {outcome.lengthscale_used:.10g}")
        print(f"n_boot: {outcome.n_boot}")
    print(f"p_value: {outcome.p_value:.10g}")
    rejected_primary = False
    for i, alpha in enumerate(levels):
        decision = outcome.p_value <= alpha
        if i == 0:
            rejected_primary = decision
        print(f"reject at {alpha:g}: {'yes' if decision else 'no'}")
    if args.exit_code_signal and rejected_primary:
        return 2
    return 0


def _cmd_simulate(args) -> int:
    dataset = sample_dataset(
        parse_hazard(args.model),
        parse_censoring(args.censoring),
        args.n,
        substream(args.seed, "simulate"),
    )
    if args.out == "-":
        print("time,event")
        for t, e in zip(dataset.times, dataset.events):
            print(f"{t!r},{int(e)}")
    else:
        write_dataset_csv(args.out, dataset)
    return 0


def _cmd_calibrate(args) -> int:
    gamma = calibrate_censoring(parse_hazard(args.model), args.target)
    print(f"{gamma:.10g}")
    return 0


def _cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.reps is not None:
        overrides["replications"] = args.reps
    if args.boot is not None:
        overrides["n_boot"] = args.boot
    if args.lengthscale is not None:
        overrides["lengthscale"] = parse_lengthscale(args.lengthscale)
    if args.tests is not None:
        overrides["tests"] = tuple(t.strip() for t in args.tests.split(","))
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    table = emit_table(run_experiment(cfg))
    if args.out == "-":
        sys.stdout.write(table)
    else:
        with open(args.out, "w") as fh:
            fh.write(table)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="censored-mmd",
        description="Goodness-of-fit tests for right-censored data, with a "
                    "simulation harness for power studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_test_parser(sub)
    _add_simulate_parser(sub)
    _add_calibrate_parser(sub)
    _add_experiment_parser(sub)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "test": _cmd_test,
        "simulate": _cmd_simulate,
        "calibrate": _cmd_calibrate,
        "experiment": _cmd_experiment,
    }
    try:
        return handlers[args.command](args)
    except (CensoredMMDError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
