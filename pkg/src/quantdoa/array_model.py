"""Uniform linear array geometry, steering vectors, and synthetic snapshots.

All positions are expressed in carrier wavelengths, angles in radians
internally (degrees only at user-facing interfaces).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ArrayGeometry",
    "SourceSet",
    "SnapshotMatrix",
    "derive_rng",
    "steering_vector",
    "manifold",
    "mean_square_aperture",
    "generate_snapshots",
]


def derive_rng(seed: int | np.random.SeedSequence, key: tuple[int, ...] = ()) -> np.random.Generator:
    """Build a counter-based generator for a (seed, stream-key) pair.

    Streams for distinct keys are independent, so work items such as Monte
    Carlo trials can be computed in any order, or concurrently, and still
    reproduce bit-identical results for a given root seed.

    Parameters
    ----------
    seed : int or numpy.random.SeedSequence
        64-bit reproducibility token, or an already-derived sequence.
    key : tuple of int, optional
        Stream selector, e.g. ``(sweep_point, trial)``.
    """
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
        if key:
            ss = np.random.SeedSequence(
                entropy=ss.entropy, spawn_key=tuple(ss.spawn_key) + tuple(int(k) for k in key)
            )
    else:
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array of ``M`` elements spaced ``d`` wavelengths apart.

    Element m (1-based) sits at ``(m - M/2) * d`` by default, which leaves
    the centroid at ``d/2`` rather than at the reference point.  Passing
    ``symmetric=True`` switches to ``(m - (M+1)/2) * d``, which centers the
    elements exactly; the flag exists to quantify how much the asymmetric
    default matters for aperture-dependent quantities.

    Parameters
    ----------
    M : int
        Element count, at least 1.
    d : float, optional
        Inter-element spacing in wavelengths (default 0.5).
    wavelength : float, optional
        Carrier wavelength; positions are stored in units of it, so the
        default of 1.0 is rarely worth changing.
    symmetric : bool, optional
        Use the zero-centroid position convention.
    """

    M: int
    d: float = 0.5
    wavelength: float = 1.0
    symmetric: bool = False

    def __post_init__(self) -> None:
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"element count must be a positive integer, got {self.M}")
        object.__setattr__(self, "M", int(self.M))
        if not self.d > 0:
            raise ValueError("element spacing must be positive")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")

    @property
    def positions(self) -> np.ndarray:
        """Element positions in wavelengths, strictly increasing."""
        m = np.arange(1, self.M + 1, dtype=float)
        offset = (self.M + 1) / 2 if self.symmetric else self.M / 2
        return (m - offset) * self.d


@dataclass(frozen=True)
class SourceSet:
    """Far-field emitters: angles in radians and per-source powers.

    Angles must be pairwise distinct and lie strictly inside (-pi/2, pi/2);
    powers are linear and positive.  Source signals are modeled as mutually
    uncorrelated circular complex Gaussians.
    """

    angles: tuple[float, ...]
    powers: tuple[float, ...]

    def __post_init__(self) -> None:
        angles = tuple(float(a) for a in self.angles)
        powers = tuple(float(p) for p in self.powers)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "powers", powers)
        if len(angles) < 1:
            raise ValueError("at least one source is required")
        if len(angles) != len(powers):
            raise ValueError("angles and powers must have equal length")
        if len(set(angles)) != len(angles):
            raise ValueError("source angles must be pairwise distinct")
        for a in angles:
            if not abs(a) < math.pi / 2:
                raise ValueError(f"source angle {a} outside (-pi/2, pi/2)")
        for p in powers:
            if not p > 0:
                raise ValueError("source powers must be positive")

    @property
    def count(self) -> int:
        return len(self.angles)

    @property
    def total_power(self) -> float:
        return math.fsum(self.powers)


@dataclass
class SnapshotMatrix:
    """M x N complex baseband samples, before or after quantization."""

    data: np.ndarray
    kind: str = "unquantized"
    bits: float | None = None

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.complex128)
        if data.ndim != 2:
            raise ValueError("snapshot data must be a 2-D (elements x snapshots) array")
        self.data = data
        if self.kind not in ("unquantized", "quantized"):
            raise ValueError(f"unknown snapshot kind {self.kind!r}")
        if self.kind == "quantized" and self.bits is None:
            raise ValueError("quantized snapshots must record their bit depth")

    @property
    def n_elements(self) -> int:
        return self.data.shape[0]

    @property
    def n_snapshots(self) -> int:
        return self.data.shape[1]

    @property
    def label(self) -> str:
        if self.kind == "unquantized":
            return "unquantized"
        b = self.bits
        return f"quantized({'inf' if math.isinf(b) else int(b)})"


def steering_vector(geometry: ArrayGeometry, theta: float) -> np.ndarray:
    """Array response ``exp(j 2 pi d_m sin(theta) / wavelength)`` per element.

    Raises
    ------
    ValueError
        If ``theta`` lies outside the open interval (-pi/2, pi/2), where the
        plane-wave phase model stops being resolvable.
    """
    theta = float(theta)
    if not abs(theta) < math.pi / 2:
        raise ValueError(f"theta={theta} outside the open interval (-pi/2, pi/2)")
    psi = geometry.positions * (math.sin(theta) / geometry.wavelength)
    return np.exp(2j * math.pi * psi)


def manifold(geometry: ArrayGeometry, thetas: np.ndarray) -> np.ndarray:
    """Steering vectors for a grid of angles, stacked as columns (M x G)."""
    thetas = np.asarray(thetas, dtype=float)
    if thetas.size and not np.all(np.abs(thetas) < math.pi / 2):
        raise ValueError("all angles must lie strictly inside (-pi/2, pi/2)")
    psi = np.outer(geometry.positions, np.sin(thetas) / geometry.wavelength)
    return np.exp(2j * math.pi * psi)


def mean_square_aperture(geometry: ArrayGeometry) -> float:
    """Sum of squared element positions, in squared wavelengths.

    Uses exactly-rounded summation so the result equals the brute-force sum
    for any element count.
    """
    return math.fsum(p * p for p in geometry.positions)


def generate_snapshots(
    geometry: ArrayGeometry,
    sources: SourceSet,
    noise_power: float,
    n_snapshots: int,
    seed: int | np.random.SeedSequence,
) -> SnapshotMatrix:
    """Draw N unquantized snapshots of the multi-emitter array model.

    Each column is ``sum_l a(theta_l) s_l + w`` with ``s_l`` i.i.d. circular
    complex Gaussian of variance ``powers[l]`` and ``w`` white circular
    complex Gaussian of variance ``noise_power`` per element.  Identical
    (inputs, seed) reproduce bit-identical output.
    """
    if n_snapshots < 1:
        raise ValueError("at least one snapshot is required")
    if noise_power < 0:
        raise ValueError("noise power must be nonnegative")
    rng = derive_rng(seed)
    L, N, M = sources.count, int(n_snapshots), geometry.M

    A = np.column_stack([steering_vector(geometry, a) for a in sources.angles])
    # Circular symmetry: each real dimension carries half the variance.
    amp = np.sqrt(np.asarray(sources.powers) / 2.0)[:, None]
    s = amp * (rng.standard_normal((L, N)) + 1j * rng.standard_normal((L, N)))
    w = math.sqrt(noise_power / 2.0) * (
        rng.standard_normal((M, N)) + 1j * rng.standard_normal((M, N))
    )
    return SnapshotMatrix(A @ s + w, kind="unquantized")
