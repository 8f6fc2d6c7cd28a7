"""b-bit ADC models: optimal scalar quantization and its linear-gain surrogate.

Two views of the same converter live here.  ``design_lloyd_max`` and
``quantize_snapshots`` implement an actual distortion-minimizing scalar
quantizer for Gaussian input, applied independently to the real and
imaginary part of every sample.  ``aqnm_transform`` replaces the nonlinear
device with the additive-noise linearization ``y_q = alpha * y + w_q``,
whose gain ``alpha = 1 - beta`` and injected-noise covariance follow from
the distortion factor ``beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from quantdoa.array_model import (
    ArrayGeometry,
    SnapshotMatrix,
    SourceSet,
    derive_rng,
    steering_vector,
)

__all__ = [
    "DISTORTION_TABLE",
    "QuantizerSpec",
    "Codebook",
    "NoiseCovariance",
    "distortion_factor",
    "design_lloyd_max",
    "gaussian_mse",
    "quantize_snapshots",
    "ideal_agc_scale",
    "aqnm_transform",
    "quantization_noise_covariance",
    "quantized_noise_floor",
    "analytic_output_covariance",
]

# Normalized MSE of the optimal scalar quantizer for a unit Gaussian source,
# stored verbatim for low bit depths; the Lloyd-Max designer exists to
# validate these constants rather than recompute them at runtime.
DISTORTION_TABLE: dict[int, float] = {
    1: 0.3634,
    2: 0.1175,
    3: 0.03454,
    4: 0.009497,
    5: 0.002499,
}

# High-rate approximation coefficient sqrt(3)*pi/2, valid from b = 6 up.
_HIGH_RATE_COEFF = math.sqrt(3.0) * math.pi / 2.0

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def distortion_factor(bits: float) -> float:
    """Distortion factor beta for a b-bit optimal scalar quantizer.

    Tabulated values for b <= 5, the high-rate approximation
    ``(sqrt(3) pi / 2) * 2**(-2b)`` for b >= 6, and 0 for infinite
    resolution.
    """
    if math.isinf(bits) and bits > 0:
        return 0.0
    b = int(bits)
    if b != bits or b < 1:
        raise ValueError(f"bit depth must be a positive integer or inf, got {bits}")
    if b <= 5:
        return DISTORTION_TABLE[b]
    return math.ldexp(_HIGH_RATE_COEFF, -2 * b)


@dataclass(frozen=True)
class QuantizerSpec:
    """Linear-gain view of a b-bit converter: gain alpha = 1 - beta."""

    bits: float
    beta: float
    alpha: float

    @classmethod
    def for_bits(cls, bits: float) -> "QuantizerSpec":
        beta = distortion_factor(bits)
        return cls(bits=math.inf if math.isinf(bits) else int(bits), beta=beta, alpha=1.0 - beta)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.bits)


@dataclass(frozen=True)
class Codebook:
    """Scalar quantizer codebook for a zero-mean unit-variance Gaussian.

    ``levels`` holds the 2^b reproduction values, strictly increasing and
    odd-symmetric about 0; ``thresholds`` holds the 2^b - 1 decision
    boundaries, each exactly the midpoint of its adjacent levels.
    """

    bits: int
    levels: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self) -> None:
        levels = np.asarray(self.levels, dtype=float)
        thresholds = np.asarray(self.thresholds, dtype=float)
        levels.setflags(write=False)
        thresholds.setflags(write=False)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "thresholds", thresholds)
        if levels.size != 2**self.bits or thresholds.size != 2**self.bits - 1:
            raise ValueError("codebook sizes inconsistent with bit depth")
        if not (np.all(levels[:-1] < thresholds) and np.all(thresholds < levels[1:])):
            raise ValueError("each threshold must lie strictly between its adjacent levels")


def _normal_pdf(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    finite = np.isfinite(x)
    out[finite] = np.exp(-0.5 * x[finite] ** 2) / _SQRT_2PI
    return out


def _upper_tail(x: np.ndarray) -> np.ndarray:
    # Survival function; evaluating ndtr(-x) keeps full relative precision
    # for x >= 0, which cell-probability differences rely on.
    out = np.empty_like(x)
    finite = np.isfinite(x)
    out[finite] = ndtr(-x[finite])
    out[~finite] = np.where(x[~finite] > 0, 0.0, 1.0)
    return out


def _half_line_cells(levels_pos: np.ndarray):
    """Edges, probabilities and centroids of the positive half of a codebook."""
    H = levels_pos.size
    edges = np.empty(H + 1)
    edges[0] = 0.0
    edges[1:H] = 0.5 * (levels_pos[:-1] + levels_pos[1:])
    edges[H] = math.inf
    tail = _upper_tail(edges)
    pdf = _normal_pdf(edges)
    prob = tail[:-1] - tail[1:]
    centroid = (pdf[:-1] - pdf[1:]) / prob
    return edges, prob, pdf, centroid


def design_lloyd_max(bits: int, tol: float = 1e-10, max_iter: int = 200) -> Codebook:
    """Solve the Lloyd fixed point for a unit Gaussian source.

    Exploits the even symmetry of the density: only the positive levels are
    free unknowns, and the middle threshold is pinned at 0, so the returned
    codebook is odd-symmetric exactly.  The stationarity system (levels are
    cell centroids, thresholds are level midpoints) is solved by Newton
    iteration with a plain Lloyd step as fallback, starting from levels at
    Gaussian quantiles of the cell midpoints; convergence is declared when
    the largest level movement of a full Lloyd step drops below ``tol``.

    Raises
    ------
    RuntimeError
        If the residual has not dropped below ``tol`` after ``max_iter``
        iterations, which indicates a tolerance or initialization bug.
    """
    b = int(bits)
    if b != bits or not 1 <= b <= 10:
        raise ValueError(f"bit depth must be an integer in [1, 10], got {bits}")
    if not tol > 0:
        raise ValueError("tolerance must be positive")

    K = 2**b
    H = K // 2
    lv = ndtri((K / 2 + np.arange(H) + 0.5) / K)

    for _ in range(max_iter):
        edges, prob, pdf, centroid = _half_line_cells(lv)
        residual = centroid - lv
        if float(np.max(np.abs(residual))) < tol:
            break
        # Jacobian of (centroid - levels) via d centroid / d edge:
        #   d c/d a = pdf(a) (c - a) / P,  d c/d b = pdf(b) (b - c) / P
        # with each interior edge the midpoint of two adjacent levels.
        d_lower = pdf[:-1] * (centroid - edges[:-1]) / prob
        d_upper = np.zeros(H)
        upper_finite = np.isfinite(edges[1:])
        d_upper[upper_finite] = (
            pdf[1:][upper_finite] * (edges[1:][upper_finite] - centroid[upper_finite])
        ) / prob[upper_finite]

        jac = -np.eye(H)
        idx = np.arange(H)
        jac[idx[1:], idx[1:] - 1] += 0.5 * d_lower[1:]
        jac[idx[1:], idx[1:]] += 0.5 * d_lower[1:]
        jac[idx[:-1], idx[:-1]] += 0.5 * d_upper[:-1]
        jac[idx[:-1], idx[:-1] + 1] += 0.5 * d_upper[:-1]

        try:
            step = np.linalg.solve(jac, -residual)
            candidate = lv + step
        except np.linalg.LinAlgError:
            candidate = centroid
        if not (candidate[0] > 0 and np.all(np.diff(candidate) > 0)):
            candidate = centroid  # Lloyd step always preserves ordering
        lv = candidate
    else:
        raise RuntimeError(
            f"Lloyd-Max design for b={b} did not reach tol={tol} in {max_iter} iterations"
        )

    levels = np.concatenate([-lv[::-1], lv])
    thresholds = 0.5 * (levels[:-1] + levels[1:])
    return Codebook(bits=b, levels=levels, thresholds=thresholds)


def gaussian_mse(levels: np.ndarray, thresholds: np.ndarray) -> float:
    """Mean squared quantization error on a unit Gaussian source.

    Evaluates ``sum_k E[(x - l_k)^2 ; x in cell k]`` in closed form, for any
    (levels, thresholds) pair, optimal or not.
    """
    levels = np.asarray(levels, dtype=float)
    edges = np.concatenate([[-math.inf], np.asarray(thresholds, dtype=float), [math.inf]])
    tail = _upper_tail(edges)
    pdf = _normal_pdf(edges)
    x_pdf = np.zeros_like(edges)
    finite = np.isfinite(edges)
    x_pdf[finite] = edges[finite] * pdf[finite]

    prob = tail[:-1] - tail[1:]
    second_moment = prob - (x_pdf[1:] - x_pdf[:-1])
    first_moment = pdf[:-1] - pdf[1:]
    return float(np.sum(second_moment - 2.0 * levels * first_moment + levels**2 * prob))


def quantize_snapshots(
    y: SnapshotMatrix, codebook: Codebook, input_scale: float
) -> SnapshotMatrix:
    """Push snapshots through the real quantizer, one real dimension at a time.

    Every entry's real and imaginary part is independently mapped to
    ``input_scale * nearest_level(value / input_scale)``, so ``input_scale``
    plays the role of an ideal AGC matched to the per-real-dimension
    standard deviation of the input.  The operation is idempotent.
    """
    if not input_scale > 0:
        raise ValueError("input scale must be positive")

    def q(real_part: np.ndarray) -> np.ndarray:
        cells = np.searchsorted(codebook.thresholds, real_part / input_scale)
        return input_scale * codebook.levels[cells]

    data = q(y.data.real) + 1j * q(y.data.imag)
    return SnapshotMatrix(data, kind="quantized", bits=codebook.bits)


def ideal_agc_scale(total_input_power: float) -> float:
    """Per-real-dimension standard deviation of a circular signal of given power."""
    if not total_input_power > 0:
        raise ValueError("total input power must be positive")
    return math.sqrt(total_input_power / 2.0)


def aqnm_transform(
    y: SnapshotMatrix,
    spec: QuantizerSpec,
    total_input_power: float,
    seed: int | np.random.SeedSequence,
) -> SnapshotMatrix:
    """Linear-gain surrogate of quantization: ``alpha * y + w_q``.

    The injected noise is circular complex Gaussian with per-element
    variance ``alpha * beta * total_input_power`` and is deterministic
    given ``seed``.  At infinite resolution the input is returned unchanged.
    """
    if not total_input_power > 0:
        raise ValueError("total input power must be positive")
    if spec.is_infinite:
        return SnapshotMatrix(y.data.copy(), kind="quantized", bits=math.inf)
    rng = derive_rng(seed)
    noise_var = spec.alpha * spec.beta * total_input_power
    shape = y.data.shape
    w_q = math.sqrt(noise_var / 2.0) * (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    )
    return SnapshotMatrix(spec.alpha * y.data + w_q, kind="quantized", bits=spec.bits)


@dataclass(frozen=True)
class NoiseCovariance:
    """Covariance of the injected quantization noise; diagonal by construction."""

    matrix: np.ndarray
    structure: str = "diagonal"

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=np.complex128)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)


def quantization_noise_covariance(
    sources: SourceSet,
    noise_power: float,
    geometry: ArrayGeometry,
    spec: QuantizerSpec,
) -> NoiseCovariance:
    """Covariance ``alpha * beta * (sum of source powers + noise power) * I``.

    Valid for unit-normalized per-source covariances, under which the
    diagonal of the pre-quantization covariance is flat across elements.
    """
    if spec.is_infinite:
        return NoiseCovariance(np.zeros((geometry.M, geometry.M), dtype=np.complex128))
    scale = spec.alpha * spec.beta * (sources.total_power + noise_power)
    return NoiseCovariance(scale * np.eye(geometry.M, dtype=np.complex128))


def quantized_noise_floor(sources: SourceSet, noise_power: float, spec: QuantizerSpec) -> float:
    """Flat noise eigenvalue after the linear-gain model.

    ``alpha^2 * noise_power + alpha * beta * (total source power + noise_power)``:
    thermal noise through the gain plus the injected quantization noise.
    """
    total = sources.total_power + noise_power
    return spec.alpha**2 * noise_power + spec.alpha * spec.beta * total


def analytic_output_covariance(
    geometry: ArrayGeometry,
    sources: SourceSet,
    noise_power: float,
    spec: QuantizerSpec,
) -> np.ndarray:
    """Exact second moment of the linear-gain model output.

    ``sum_l alpha^2 p_l a(theta_l) a(theta_l)^H + noise_floor * I`` -- the
    covariance whose eigenstructure subspace estimators see in the limit of
    infinitely many snapshots.
    """
    M = geometry.M
    R = quantized_noise_floor(sources, noise_power, spec) * np.eye(M, dtype=np.complex128)
    for angle, power in zip(sources.angles, sources.powers):
        a = steering_vector(geometry, angle)
        R += (spec.alpha**2 * power) * np.outer(a, a.conj())
    return R
