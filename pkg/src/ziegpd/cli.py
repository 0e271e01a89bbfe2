"""Command-line interface.

Batch subcommands covering the whole workflow: preprocess raw daily
CSVs, fit models, draw samples, compute return levels, run simulation
studies and emit diagnostic plot data.  Exit codes: 0 success, 1 for
usage/IO problems, 2 for numerical failures.  Errors are reported as a
single JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .diagnostics import cdf_compare_data, qq_data, write_cdf_csv, write_qq_csv
from .inference import FitError, FitOptions, McmcOptions, bootstrap_ci, fit_bayes, fit_mle
from .model import params_from_dict, return_level, ziegpd_sample
from .pipeline import (
    DataError,
    load_daily_csv,
    preprocess,
    read_sample_file,
    write_sample_file,
)
from .simulation import load_sim_config, run_study, write_raw_csv, write_rmse_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route through our codes
    def error(self, message):
        raise _UsageError(message)


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def _load_params(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if isinstance(doc, dict) and "estimates" in doc:
        doc = doc["estimates"]
    return params_from_dict(doc)


def _parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ziegpd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model to a sample file (one value per line)")
    p.add_argument("--input", required=True)
    p.add_argument("--model", required=True, choices=("m1", "m2", "m3"))
    p.add_argument("--method", required=True, choices=("mle", "bayes"))
    p.add_argument("--bootstrap", type=int, default=0, metavar="B",
                   help="bootstrap replicates for MLE confidence intervals")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="run a simulation study from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("sample", help="draw synthetic values from a parameter file")
    p.add_argument("--params", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("rlevel", help="return levels for the given periods")
    p.add_argument("--params", required=True)
    p.add_argument("--periods", required=True, help="comma separated, e.g. 5,10,20")
    p.add_argument("--out", required=True)

    p = sub.add_parser("diagnose", help="QQ and CDF-overlay data for a fitted model")
    p.add_argument("--input", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--grid-size", type=int, default=200)
    p.add_argument("--positions", default="weibull", choices=("weibull", "hazen"))
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("preprocess", help="thin, extract months and threshold a daily CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--thin", type=int, default=3)
    p.add_argument("--thin-offset", type=int, default=0)
    p.add_argument("--months", default="11,12,1,2")
    p.add_argument("--cutoff", type=float, default=0.1)
    p.add_argument("--date-col", default="date")
    p.add_argument("--precip-col", default="precip")
    p.add_argument("--missing", type=float, default=-999.0)
    p.add_argument("--out", required=True)

    return parser


def _cmd_fit(args) -> int:
    data = read_sample_file(args.input)
    mcmc = McmcOptions()
    if args.chains is not None:
        mcmc.chains = args.chains
    if args.iterations is not None:
        mcmc.iterations = args.iterations
    if args.burn_in is not None:
        mcmc.burn_in = args.burn_in
    opts = FitOptions(method=args.method, model=args.model, alpha=args.alpha,
                      mcmc=mcmc, seed=args.seed)
    if args.method == "mle":
        result = fit_mle(data, opts)
        if args.bootstrap:
            boot = bootstrap_ci(data, opts, B=args.bootstrap, alpha=args.alpha, seed=args.seed)
            result.intervals = boot.intervals
            result.level = boot.level
            result.diagnostics["bootstrap_replicates"] = boot.B
            result.diagnostics["bootstrap_failures"] = boot.n_failed
    else:
        if args.bootstrap:
            raise _UsageError("--bootstrap applies to --method mle only")
        result = fit_bayes(data, opts)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(result.to_json(indent=2) + "\n")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = load_sim_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_study(cfg)
    write_rmse_csv(result.table, out_dir / "rmse.csv")
    write_raw_csv(result.raw, out_dir / "raw_estimates.csv")
    return EXIT_OK


def _cmd_sample(args) -> int:
    theta = _load_params(args.params)
    sample = ziegpd_sample(args.n, theta, args.seed)
    write_sample_file(sample, args.out)
    return EXIT_OK


def _cmd_rlevel(args) -> int:
    theta = _load_params(args.params)
    periods = _parse_float_list(args.periods)
    if not periods:
        raise _UsageError("--periods must name at least one return period")
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("period,probability,return_level\n")
        for T in periods:
            level = return_level(T, theta)
            fh.write(f"{T:g},{1.0 - 1.0 / T:.6g},{level:.6g}\n")
    return EXIT_OK


def _cmd_diagnose(args) -> int:
    data = read_sample_file(args.input)
    theta = _load_params(args.params)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_qq_csv(qq_data(data, theta, positions=args.positions), out_dir / "qq.csv")
    write_cdf_csv(cdf_compare_data(data, theta, grid_size=args.grid_size), out_dir / "cdf.csv")
    return EXIT_OK


def _cmd_preprocess(args) -> int:
    series, report = load_daily_csv(
        args.input, date_col=args.date_col, precip_col=args.precip_col, missing=args.missing
    )
    months = _parse_int_list(args.months)
    sample = preprocess(series, step=args.thin, offset=args.thin_offset,
                        months=months, cutoff=args.cutoff)
    write_sample_file(sample, args.out)
    if report.dropped_missing:
        sys.stderr.write(
            json.dumps({"note": "dropped_missing", "count": report.dropped_missing}) + "\n"
        )
    return EXIT_OK


_COMMANDS = {
    "fit": _cmd_fit,
    "simulate": _cmd_simulate,
    "sample": _cmd_sample,
    "rlevel": _cmd_rlevel,
    "diagnose": _cmd_diagnose,
    "preprocess": _cmd_preprocess,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        _emit_error("usage", str(err))
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as err:
        _emit_error("usage", str(err))
        return EXIT_USAGE
    except FitError as err:
        _emit_error("fit", str(err))
        return EXIT_NUMERIC
    except (DataError, OSError, json.JSONDecodeError) as err:
        _emit_error("io", str(err))
        return EXIT_USAGE
    except ValueError as err:
        _emit_error("invalid", str(err))
        return EXIT_USAGE


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
