"""Command-line front end for the sweep runners.

Subcommands mirror the harness: ``loss-vs-bits``, ``loss-vs-snr``,
``rmse-vs-snr``, ``crlb-table``, and ``spectrum``.  Flags override values
from an optional ``--config`` file, which in turn overrides the defaults.

Exit codes: 0 success, 1 configuration error, 2 estimation/runtime error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import re
import sys

from quantdoa.estimators import EstimationError
from quantdoa.harness import (
    ConfigError,
    ExperimentConfig,
    _parse_bits,
    emit_csv,
    run_crlb_table,
    run_loss_factor_vs_bits,
    run_loss_factor_vs_snr,
    run_rmse_vs_snr,
    run_spectrum,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the CLI contract wants 1.
    # The widened matcher lets values like "-20:10:20" follow --snr-db without
    # being mistaken for an option string.
    def __init__(self, *args, **kwargs) -> None:
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r"^-\d+(\.\d+)?([:.\d]*)$")

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(message)


def _parse_snr_grid(text: str) -> tuple[float, ...]:
    """Parse ``start:step:stop`` (inclusive) or a single SNR value in dB."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return (float(parts[0]),)
        if len(parts) != 3:
            raise ValueError(text)
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(text)
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + k * step for k in range(count))
    except ValueError as exc:
        raise ConfigError(f"invalid --snr-db value {text!r}; expected start:step:stop") from exc


def _parse_bits_list(text: str) -> tuple[float, ...]:
    return tuple(_parse_bits(p) for p in text.split(",") if p.strip())


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="config file of 'key = value' lines")
    sub.add_argument("--seed", type=int, help="64-bit reproducibility seed")
    sub.add_argument("--out", help="output CSV path (default: <command>.csv)")
    sub.add_argument("--trials", type=int, help="Monte Carlo trials per sweep point")
    sub.add_argument("--bits", help="comma-separated bit depths, e.g. 1,2,3,inf")
    sub.add_argument("--snr-db", help="SNR grid in dB as start:step:stop")
    sub.add_argument("--estimators", help="comma-separated subset of root_music,esprit")
    sub.add_argument(
        "--aqnm",
        action="store_true",
        help="inject linear-model quantization noise instead of running the real quantizer",
    )
    sub.add_argument(
        "--symmetric-array",
        action="store_true",
        help="center element positions on the reference point",
    )
    sub.add_argument("--workers", type=int, help="thread count for Monte Carlo trials")


def _build_parser() -> _Parser:
    parser = _Parser(prog="quantdoa", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)
    for name, descr in (
        ("loss-vs-bits", "analytic loss factor per (bits, SNR)"),
        ("loss-vs-snr", "analytic loss factor per (SNR, bits)"),
        ("rmse-vs-snr", "Monte Carlo estimator RMSE with root-CRLB overlay"),
        ("crlb-table", "root-CRLB in degrees over the (SNR, bits) grid"),
        ("spectrum", "pseudospectrum of one simulated batch over an angle grid"),
    ):
        sub = commands.add_parser(name, help=descr)
        _add_common_flags(sub)
        if name == "spectrum":
            sub.add_argument(
                "--grid-step-deg", type=float, default=0.01, help="angle grid spacing in degrees"
            )
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.trials is not None:
        config.trials = args.trials
    if args.bits is not None:
        config.bits = _parse_bits_list(args.bits)
    if args.snr_db is not None:
        config.snr_grid_db = _parse_snr_grid(args.snr_db)
    if args.estimators is not None:
        config.estimators = tuple(p.strip() for p in args.estimators.split(",") if p.strip())
    if args.aqnm:
        config.quantizer_mode = "aqnm"
    if args.symmetric_array:
        config.symmetric_array = True
    if args.out is not None:
        config.output = args.out
    config.validate()
    return config


def _write_spectrum(config: ExperimentConfig, grid_step_deg: float, path: str) -> None:
    grid_deg, values = run_spectrum(config, grid_step_deg)
    lines = ["# kind = spectrum"]
    lines += [f"# {key} = {text}" for key, text in config.as_items()]
    lines.append("theta_deg,pseudospectrum")
    lines += [f"{repr(float(t))},{repr(float(s))}" for t, s in zip(grid_deg, values)]
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"failed to write CSV to {path}: {exc}") from exc


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        config = _config_from_args(args)
        out_path = config.output or f"{args.command.replace('-', '_')}.csv"

        if args.command == "spectrum":
            _write_spectrum(config, args.grid_step_deg, out_path)
            print(f"wrote {out_path}")
            return 0

        if args.command == "rmse-vs-snr":
            result = run_rmse_vs_snr(config, workers=args.workers or 1)
        else:
            runner = {
                "loss-vs-bits": run_loss_factor_vs_bits,
                "loss-vs-snr": run_loss_factor_vs_snr,
                "crlb-table": run_crlb_table,
            }[args.command]
            result = runner(config)
        emit_csv(result, out_path)
        print(f"wrote {out_path} ({len(result.rows)} rows)")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except (EstimationError, RuntimeError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


def app() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    app()
