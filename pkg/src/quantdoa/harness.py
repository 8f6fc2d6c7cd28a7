"""Seeded Monte Carlo sweeps and their CSV serialization.

Three sweep kinds mirror the three summary figures of the study: the
analytic loss factor against bit depth and against SNR, and the simulated
RMSE of the subspace estimators against SNR with the root-CRLB overlaid.
Every sweep is a pure function of (config, seed); trials derive their
random streams from a counter-based hash of the seed and trial index, so
results do not depend on execution order or thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from functools import partial

import numpy as np
from threadpoolctl import threadpool_limits

from quantdoa.array_model import ArrayGeometry, SourceSet, generate_snapshots
from quantdoa.crlb import OperatingPoint, crlb, performance_loss_db
from quantdoa.estimators import EstimationError, decompose, esprit, music_pseudospectrum, root_music, sample_covariance
from quantdoa.quantizer import (
    QuantizerSpec,
    aqnm_transform,
    design_lloyd_max,
    ideal_agc_scale,
    quantize_snapshots,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "SweepRow",
    "SweepResult",
    "rmse",
    "run_loss_factor_vs_bits",
    "run_loss_factor_vs_snr",
    "run_rmse_vs_snr",
    "run_crlb_table",
    "run_spectrum",
    "emit_csv",
    "parse_csv",
    "CSV_COLUMNS",
]

ESTIMATOR_NAMES = ("root_music", "esprit")
QUANTIZER_MODES = ("true_quantizer", "aqnm")

CSV_COLUMNS = (
    "sweep_var",
    "b",
    "estimator",
    "rmse_deg",
    "crlb_sqrt_deg",
    "eta_db",
    "trials",
    "failures",
)


class ConfigError(ValueError):
    """Invalid experiment configuration or config file."""


def _format_bits(b: float) -> str:
    return "inf" if math.isinf(b) else str(int(b))


def _parse_bits(text: str) -> float:
    text = text.strip()
    if text == "inf":
        return math.inf
    try:
        return float(int(text))
    except ValueError as exc:
        raise ConfigError(f"invalid bit depth {text!r}") from exc


@dataclass
class ExperimentConfig:
    """Sweep parameters; the defaults reproduce the reference scenario.

    ``bits`` entries are positive integers or ``inf``; ``snr_grid_db`` holds
    input SNRs in dB.  ``quantizer_mode`` selects the real Lloyd-Max
    quantizer (default) or the additive-noise linearization for the RMSE
    sweep, so the two can be compared at identical seeds.
    """

    theta_deg: float = 15.0
    M: int = 128
    d_in_wavelengths: float = 0.5
    N: int = 32
    trials: int = 8000
    seed: int = 1
    bits: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0, 5.0)
    snr_grid_db: tuple[float, ...] = (-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
    estimators: tuple[str, ...] = ("root_music", "esprit")
    quantizer_mode: str = "true_quantizer"
    output: str = ""
    symmetric_array: bool = False

    def __post_init__(self) -> None:
        self.bits = tuple(float(b) for b in self.bits)
        self.snr_grid_db = tuple(float(s) for s in self.snr_grid_db)
        self.estimators = tuple(str(e) for e in self.estimators)

    def validate(self) -> None:
        if not -90.0 < self.theta_deg < 90.0:
            raise ConfigError("theta_deg must lie strictly inside (-90, 90)")
        if self.M < 2:
            raise ConfigError("M must be at least 2")
        if not self.d_in_wavelengths > 0:
            raise ConfigError("d_in_wavelengths must be positive")
        if self.N < 1 or self.trials < 1:
            raise ConfigError("N and trials must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not self.bits:
            raise ConfigError("bits list must not be empty")
        for b in self.bits:
            if not (math.isinf(b) or (b == int(b) and b >= 1)):
                raise ConfigError(f"invalid bit depth {b}")
        if not self.snr_grid_db:
            raise ConfigError("snr_grid_db must not be empty")
        if not self.estimators:
            raise ConfigError("estimator set must not be empty")
        for name in self.estimators:
            if name not in ESTIMATOR_NAMES:
                raise ConfigError(f"unknown estimator {name!r}; choose from {ESTIMATOR_NAMES}")
        if self.quantizer_mode not in QUANTIZER_MODES:
            raise ConfigError(f"unknown quantizer mode {self.quantizer_mode!r}")
        if self.quantizer_mode == "true_quantizer":
            for b in self.bits:
                if not math.isinf(b) and b > 10:
                    raise ConfigError(
                        "true-quantizer mode designs codebooks only up to 10 bits; use aqnm mode beyond"
                    )

    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry(self.M, self.d_in_wavelengths, symmetric=self.symmetric_array)

    # -- flat key/value form, shared by the config file and the CSV echo --

    def as_items(self) -> list[tuple[str, str]]:
        out: list[tuple[str, str]] = []
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "bits":
                text = ",".join(_format_bits(b) for b in value)
            elif f.name == "snr_grid_db":
                text = ",".join(repr(s) for s in value)
            elif f.name == "estimators":
                text = ",".join(value)
            elif isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            out.append((f.name, text))
        return out

    @classmethod
    def from_items(cls, items: dict[str, str]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        kwargs: dict[str, object] = {}
        for key, raw in items.items():
            if key not in known:
                raise ConfigError(f"unknown config field {key!r}")
            raw = raw.strip()
            try:
                if key in ("theta_deg", "d_in_wavelengths"):
                    kwargs[key] = float(raw)
                elif key in ("M", "N", "trials", "seed"):
                    kwargs[key] = int(raw)
                elif key == "bits":
                    kwargs[key] = tuple(_parse_bits(p) for p in raw.split(",") if p.strip())
                elif key == "snr_grid_db":
                    kwargs[key] = tuple(float(p) for p in raw.split(",") if p.strip())
                elif key == "estimators":
                    kwargs[key] = tuple(p.strip() for p in raw.split(",") if p.strip())
                elif key == "symmetric_array":
                    if raw not in ("true", "false"):
                        raise ConfigError(f"symmetric_array must be true or false, got {raw!r}")
                    kwargs[key] = raw == "true"
                else:
                    kwargs[key] = raw
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"invalid value for {key}: {raw!r}") from exc
        return cls(**kwargs)

    def to_file(self, path: str) -> None:
        lines = [f"{key} = {text}" for key, text in self.as_items()]
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        items: dict[str, str] = {}
        try:
            with open(path, "r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    stripped = line.strip()
                    if not stripped or stripped.startswith("#"):
                        continue
                    if "=" not in stripped:
                        raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                    key, _, raw = stripped.partition("=")
                    items[key.strip()] = raw.strip()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        return cls.from_items(items)


@dataclass
class SweepRow:
    """One output record: a sweep position plus everything measured there."""

    sweep_var: float
    bits: float
    estimator: str = ""
    rmse_deg: float | None = None
    crlb_sqrt_deg: float | None = None
    eta_db: float | None = None
    trials: int = 0
    failures: int = 0


@dataclass
class SweepResult:
    """Rows of a sweep plus the configuration that produced them."""

    kind: str
    config: ExperimentConfig
    rows: list[SweepRow] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def rmse(estimates: np.ndarray, truth: float) -> float:
    """Root mean squared angular error, radians in, degrees out."""
    est = np.asarray(estimates, dtype=float)
    if est.size == 0:
        raise ValueError("rmse needs at least one estimate")
    return math.degrees(math.sqrt(float(np.mean((est - float(truth)) ** 2))))


def _bits_sort_key(b: float) -> float:
    return math.inf if math.isinf(b) else b


def _crlb_sqrt_deg(config: ExperimentConfig, snr_db: float, bits: float) -> float:
    point = OperatingPoint(
        geometry=config.geometry(),
        theta=math.radians(config.theta_deg),
        signal_power=10.0 ** (snr_db / 10.0),
        noise_power=1.0,
        snapshots=config.N,
        spec=QuantizerSpec.for_bits(bits),
    )
    return math.degrees(math.sqrt(crlb(point)))


def run_loss_factor_vs_bits(config: ExperimentConfig) -> SweepResult:
    """Loss factor over (bits, SNR); purely analytic, no Monte Carlo trials.

    Rows are ordered by bit depth first, matching the figure that sweeps
    bit depth on its x axis with one curve per SNR.
    """
    config.validate()
    rows = []
    for b in sorted(config.bits, key=_bits_sort_key):
        for snr_db in sorted(config.snr_grid_db):
            gamma = 10.0 ** (snr_db / 10.0)
            rows.append(
                SweepRow(
                    sweep_var=snr_db,
                    bits=b,
                    eta_db=performance_loss_db(b, gamma),
                    crlb_sqrt_deg=_crlb_sqrt_deg(config, snr_db, b),
                )
            )
    return SweepResult(kind="loss_vs_bits", config=config, rows=rows)


def _low_snr_floor_note(bits: float) -> str:
    spec = QuantizerSpec.for_bits(bits)
    floor_db = 10.0 * math.log10(1.0 / spec.alpha)
    if spec.beta > 0 and floor_db < 2.0:
        crossing = (spec.alpha * 10.0**0.2 - 1.0) / spec.beta
        return (
            f"b={_format_bits(bits)} loss floor is {floor_db:.4f} dB at vanishing SNR; "
            f"it exceeds 2 dB only above {10.0 * math.log10(crossing):.1f} dB input SNR"
        )
    return f"b={_format_bits(bits)} loss floor is {floor_db:.4f} dB at vanishing SNR"


def run_loss_factor_vs_snr(config: ExperimentConfig) -> SweepResult:
    """Loss factor over (SNR, bits); analytic, ordered by SNR first."""
    config.validate()
    rows = []
    for snr_db in sorted(config.snr_grid_db):
        gamma = 10.0 ** (snr_db / 10.0)
        for b in sorted(config.bits, key=_bits_sort_key):
            rows.append(
                SweepRow(
                    sweep_var=snr_db,
                    bits=b,
                    eta_db=performance_loss_db(b, gamma),
                    crlb_sqrt_deg=_crlb_sqrt_deg(config, snr_db, b),
                )
            )
    notes = [_low_snr_floor_note(b) for b in sorted(config.bits, key=_bits_sort_key) if b == 1.0]
    return SweepResult(kind="loss_vs_snr", config=config, rows=rows, notes=notes)


def run_crlb_table(config: ExperimentConfig) -> SweepResult:
    """Root-CRLB in degrees and loss factor over the (SNR, bits) grid."""
    config.validate()
    rows = []
    for snr_db in sorted(config.snr_grid_db):
        for b in sorted(config.bits, key=_bits_sort_key):
            rows.append(
                SweepRow(
                    sweep_var=snr_db,
                    bits=b,
                    crlb_sqrt_deg=_crlb_sqrt_deg(config, snr_db, b),
                    eta_db=performance_loss_db(b, 10.0 ** (snr_db / 10.0)),
                )
            )
    return SweepResult(kind="crlb_table", config=config, rows=rows)


_ESTIMATORS = {"root_music": root_music, "esprit": esprit}


def _run_trial(
    config: ExperimentConfig,
    geometry: ArrayGeometry,
    sources: SourceSet,
    codebook,
    spec: QuantizerSpec,
    point_key: tuple[int, int],
    trial: int,
) -> dict[str, float | None]:
    root = np.random.SeedSequence(config.seed, spawn_key=(*point_key, trial))
    gen_seed, aqnm_seed = root.spawn(2)
    y = generate_snapshots(geometry, sources, 1.0, config.N, gen_seed)
    total_power = sources.total_power + 1.0
    if config.quantizer_mode == "true_quantizer":
        if codebook is None:
            y_q = y  # infinite resolution
        else:
            y_q = quantize_snapshots(y, codebook, ideal_agc_scale(total_power))
    else:
        y_q = aqnm_transform(y, spec, total_power, aqnm_seed)
    R = sample_covariance(y_q)

    out: dict[str, float | None] = {}
    for name in config.estimators:
        try:
            out[name] = float(_ESTIMATORS[name](R, 1, geometry).angles[0])
        except EstimationError:
            out[name] = None
    return out


def run_rmse_vs_snr(config: ExperimentConfig, workers: int = 1) -> SweepResult:
    """Monte Carlo RMSE per (SNR, bits, estimator) with the root-CRLB overlay.

    Per-trial random streams are keyed by (SNR index, bits index, trial), so
    any ``workers`` count produces identical rows; the thread count is an
    execution knob, not part of the experiment.  Estimation failures are
    excluded from the RMSE and surface in the failure count instead.
    """
    config.validate()
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    geometry = config.geometry()
    theta = math.radians(config.theta_deg)
    snr_values = sorted(config.snr_grid_db)
    bits_values = sorted(config.bits, key=_bits_sort_key)

    codebooks = {
        b: design_lloyd_max(int(b))
        for b in bits_values
        if not math.isinf(b) and config.quantizer_mode == "true_quantizer"
    }
    specs = {b: QuantizerSpec.for_bits(b) for b in bits_values}

    rows = []
    # Single-threaded BLAS keeps trial results independent of worker count
    # (and is faster than oversubscribed threads at these matrix sizes).
    with threadpool_limits(limits=1):
        for i, snr_db in enumerate(snr_values):
            signal_power = 10.0 ** (snr_db / 10.0)
            sources = SourceSet(angles=(theta,), powers=(signal_power,))
            for j, b in enumerate(bits_values):
                run = partial(
                    _run_trial, config, geometry, sources, codebooks.get(b), specs[b], (i, j)
                )
                if workers > 1:
                    with ThreadPoolExecutor(max_workers=workers) as pool:
                        outcomes = list(pool.map(run, range(config.trials)))
                else:
                    outcomes = [run(t) for t in range(config.trials)]

                for name in config.estimators:
                    estimates = [o[name] for o in outcomes if o[name] is not None]
                    failures = config.trials - len(estimates)
                    rows.append(
                        SweepRow(
                            sweep_var=snr_db,
                            bits=b,
                            estimator=name,
                            rmse_deg=rmse(np.array(estimates), theta) if estimates else None,
                            crlb_sqrt_deg=_crlb_sqrt_deg(config, snr_db, b),
                            eta_db=performance_loss_db(b, signal_power),
                            trials=config.trials,
                            failures=failures,
                        )
                    )
    return SweepResult(kind="rmse_vs_snr", config=config, rows=rows)


def run_spectrum(config: ExperimentConfig, grid_step_deg: float = 0.01) -> tuple[np.ndarray, np.ndarray]:
    """Pseudospectrum of one simulated batch over a dense angle grid.

    Uses the first entry of the bits list; returns (grid in degrees, value).
    """
    config.validate()
    if not grid_step_deg > 0:
        raise ConfigError("grid step must be positive")
    geometry = config.geometry()
    theta = math.radians(config.theta_deg)
    signal_power = 10.0 ** (sorted(config.snr_grid_db)[0] / 10.0)
    sources = SourceSet(angles=(theta,), powers=(signal_power,))
    b = sorted(config.bits, key=_bits_sort_key)[0]
    spec = QuantizerSpec.for_bits(b)
    codebook = None
    if config.quantizer_mode == "true_quantizer" and not math.isinf(b):
        codebook = design_lloyd_max(int(b))

    outcome_seed = np.random.SeedSequence(config.seed, spawn_key=(0, 0, 0))
    gen_seed, aqnm_seed = outcome_seed.spawn(2)
    y = generate_snapshots(geometry, sources, 1.0, config.N, gen_seed)
    total_power = sources.total_power + 1.0
    if config.quantizer_mode == "true_quantizer":
        y_q = y if codebook is None else quantize_snapshots(y, codebook, ideal_agc_scale(total_power))
    else:
        y_q = aqnm_transform(y, spec, total_power, aqnm_seed)

    decomp = decompose(sample_covariance(y_q), 1)
    half = 90.0 - grid_step_deg
    n = int(round(2 * half / grid_step_deg)) + 1
    grid_deg = np.linspace(-half, half, n)
    spectrum = music_pseudospectrum(decomp, geometry, np.deg2rad(grid_deg))
    return grid_deg, spectrum


# -- CSV serialization ------------------------------------------------------


def _format_cell(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def emit_csv(result: SweepResult, path: str) -> None:
    """Write a sweep as CSV: config echo in ``#`` comments, then the rows.

    UTF-8, LF line endings, shortest round-trip float formatting; parsing
    the file back reproduces the SweepResult exactly.
    """
    lines = [f"# kind = {result.kind}"]
    lines += [f"# {key} = {text}" for key, text in result.config.as_items()]
    lines += [f"# note: {note}" for note in result.notes]
    lines.append(",".join(CSV_COLUMNS))
    for row in result.rows:
        lines.append(
            ",".join(
                (
                    repr(float(row.sweep_var)),
                    _format_bits(row.bits),
                    row.estimator,
                    _format_cell(row.rmse_deg),
                    _format_cell(row.crlb_sqrt_deg),
                    _format_cell(row.eta_db),
                    str(int(row.trials)),
                    str(int(row.failures)),
                )
            )
        )
    text = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"failed to write CSV to {path}: {exc}") from exc


def _parse_cell(text: str) -> float | None:
    return None if text == "" else float(text)


def parse_csv(path: str) -> SweepResult:
    """Read a CSV produced by :func:`emit_csv` back into a SweepResult."""
    kind = ""
    items: dict[str, str] = {}
    notes: list[str] = []
    rows: list[SweepRow] = []
    header_seen = False
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#"):
                    body = line[1:].strip()
                    if body.startswith("note:"):
                        notes.append(body[len("note:") :].strip())
                    elif "=" in body:
                        key, _, raw = body.partition("=")
                        key = key.strip()
                        if key == "kind":
                            kind = raw.strip()
                        else:
                            items[key] = raw.strip()
                    continue
                if not header_seen:
                    if tuple(line.split(",")) != CSV_COLUMNS:
                        raise ConfigError(f"unexpected CSV header in {path}: {line!r}")
                    header_seen = True
                    continue
                cells = line.split(",")
                if len(cells) != len(CSV_COLUMNS):
                    raise ConfigError(f"malformed CSV row in {path}: {line!r}")
                rows.append(
                    SweepRow(
                        sweep_var=float(cells[0]),
                        bits=_parse_bits(cells[1]),
                        estimator=cells[2],
                        rmse_deg=_parse_cell(cells[3]),
                        crlb_sqrt_deg=_parse_cell(cells[4]),
                        eta_db=_parse_cell(cells[5]),
                        trials=int(cells[6]),
                        failures=int(cells[7]),
                    )
                )
    except OSError as exc:
        raise OSError(f"failed to read CSV from {path}: {exc}") from exc
    if not header_seen:
        raise ConfigError(f"no CSV header found in {path}")
    return SweepResult(kind=kind, config=ExperimentConfig.from_items(items), rows=rows, notes=notes)
