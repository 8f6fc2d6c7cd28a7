"""Subspace DOA estimators operating on (quantized) snapshot covariances.

Spectral MUSIC, Root-MUSIC and least-squares ESPRIT all act on the sample
covariance alone, so quantization enters only through the covariance it
produces; the algorithms themselves are bit-depth agnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from quantdoa.array_model import ArrayGeometry, SnapshotMatrix, manifold

__all__ = [
    "EstimationError",
    "SubspaceDecomposition",
    "DoaEstimate",
    "sample_covariance",
    "decompose",
    "music_pseudospectrum",
    "music",
    "root_music",
    "esprit",
]


class EstimationError(RuntimeError):
    """Raised when an estimator cannot produce the requested number of angles."""


@dataclass(frozen=True)
class SubspaceDecomposition:
    """Signal/noise eigenvector split of a Hermitian covariance.

    ``eigenvalues`` are sorted descending; the leading ``L`` eigenvectors
    form ``signal_basis`` and the remaining ``M - L`` form ``noise_basis``.
    """

    signal_basis: np.ndarray
    noise_basis: np.ndarray
    eigenvalues: np.ndarray

    @property
    def n_sources(self) -> int:
        return self.signal_basis.shape[1]


@dataclass(frozen=True)
class DoaEstimate:
    """Estimated arrival angles in radians, sorted ascending.

    ``diagnostics`` carries method-specific evidence aligned with the sorted
    angles: selected root moduli for Root-MUSIC, rotation eigenvalues for
    ESPRIT, peak heights for spectral MUSIC.  ``clamped`` counts angles whose
    phase argument fell outside the arcsin domain and was clipped to an
    endpoint.
    """

    angles: np.ndarray
    method: str
    diagnostics: np.ndarray = field(default_factory=lambda: np.empty(0))
    clamped: int = 0


def sample_covariance(y: SnapshotMatrix | np.ndarray) -> np.ndarray:
    """Biased sample covariance ``(1/N) sum_n y(n) y(n)^H``."""
    data = y.data if isinstance(y, SnapshotMatrix) else np.asarray(y, dtype=np.complex128)
    if data.ndim != 2 or data.shape[1] < 1:
        raise ValueError("need a 2-D matrix with at least one snapshot")
    return data @ data.conj().T / data.shape[1]


def decompose(R: np.ndarray, L: int) -> SubspaceDecomposition:
    """Eigendecompose a Hermitian covariance into signal and noise subspaces.

    Works for rank-deficient covariances too (the N < M regime): whatever
    eigenvectors fall outside the top ``L`` are treated as noise subspace.
    Eigenvalue ties make the split arbitrary; the eigen-solver's output
    order is kept in that case.
    """
    R = np.asarray(R, dtype=np.complex128)
    M = R.shape[0]
    if R.ndim != 2 or R.shape[1] != M:
        raise ValueError("covariance must be square")
    if not np.allclose(R, R.conj().T, rtol=1e-8, atol=1e-12 * max(1.0, float(np.abs(R).max(initial=0.0)))):
        raise ValueError("covariance must be Hermitian")
    if not 1 <= L < M:
        raise ValueError(f"source count must satisfy 1 <= L < M, got L={L}, M={M}")

    eigenvalues, eigenvectors = np.linalg.eigh(R)
    eigenvalues = eigenvalues[::-1]
    eigenvectors = eigenvectors[:, ::-1]
    return SubspaceDecomposition(
        signal_basis=eigenvectors[:, :L],
        noise_basis=eigenvectors[:, L:],
        eigenvalues=eigenvalues,
    )


def music_pseudospectrum(
    decomp: SubspaceDecomposition, geometry: ArrayGeometry, theta_grid: np.ndarray
) -> np.ndarray:
    """Evaluate ``1 / ||U_N^H a(theta)||^2`` over a grid of angles."""
    if decomp.noise_basis.shape[1] < 1:
        raise ValueError("noise subspace is empty")
    A = manifold(geometry, theta_grid)
    projected = decomp.noise_basis.conj().T @ A
    denom = np.sum(projected.real**2 + projected.imag**2, axis=0)
    with np.errstate(divide="ignore"):
        return 1.0 / denom


def _default_grid(step_deg: float) -> np.ndarray:
    half = 90.0 - step_deg
    n = int(round(2 * half / step_deg)) + 1
    return np.deg2rad(np.linspace(-half, half, n))


def music(
    R: np.ndarray, L: int, geometry: ArrayGeometry, grid_step_deg: float = 0.01
) -> DoaEstimate:
    """Spectral MUSIC: pick the L largest pseudospectrum peaks on a grid."""
    decomp = decompose(R, L)
    grid = _default_grid(grid_step_deg)
    spectrum = music_pseudospectrum(decomp, geometry, grid)

    interior = np.flatnonzero(
        (spectrum[1:-1] >= spectrum[:-2]) & (spectrum[1:-1] >= spectrum[2:])
    ) + 1
    if interior.size < L:
        raise EstimationError(
            f"found {interior.size} pseudospectrum peaks, need {L}"
        )
    best = interior[np.argsort(spectrum[interior])][-L:]
    order = np.argsort(grid[best])
    return DoaEstimate(
        angles=grid[best][order], method="music", diagnostics=spectrum[best][order]
    )


def _phases_to_angles(
    phases: np.ndarray, geometry: ArrayGeometry
) -> tuple[np.ndarray, int]:
    """Map phase arguments to angles via arcsin(wavelength * arg / (2 pi d))."""
    sin_theta = phases * geometry.wavelength / (2.0 * math.pi * geometry.d)
    clamped = int(np.count_nonzero(np.abs(sin_theta) > 1.0))
    return np.arcsin(np.clip(sin_theta, -1.0, 1.0)), clamped


def _require_unambiguous(geometry: ArrayGeometry) -> None:
    if geometry.d > geometry.wavelength / 2.0:
        raise ValueError(
            "element spacing above half a wavelength makes the phase-to-angle map ambiguous"
        )


def root_music(R: np.ndarray, L: int, geometry: ArrayGeometry) -> DoaEstimate:
    """Root-MUSIC: root the noise-projector polynomial instead of grid search.

    Builds ``C = U_N U_N^H``, forms the degree ``2(M-1)`` polynomial whose
    k-th coefficient is the sum of the k-th diagonal of ``C`` (which makes
    the coefficient vector conjugate-symmetric, so roots come in
    conjugate-reciprocal pairs), roots it via companion-matrix eigenvalues,
    and keeps the ``L`` roots strictly inside the unit circle with largest
    modulus.

    Raises
    ------
    EstimationError
        If fewer than ``L`` roots fall strictly inside the unit circle,
        which signals a degenerate covariance.
    """
    _require_unambiguous(geometry)
    decomp = decompose(R, L)
    M = geometry.M
    if R.shape[0] != M:
        raise ValueError("covariance size does not match the array geometry")

    C = decomp.noise_basis @ decomp.noise_basis.conj().T
    coeffs = np.array([np.trace(C, offset) for offset in range(-(M - 1), M)])
    roots = np.roots(coeffs[::-1])

    angles, moduli, clamped = _select_signal_roots(roots, L, geometry)
    return DoaEstimate(angles=angles, method="root_music", diagnostics=moduli, clamped=clamped)


def _select_signal_roots(
    roots: np.ndarray, L: int, geometry: ArrayGeometry
) -> tuple[np.ndarray, np.ndarray, int]:
    """Keep the L strictly-inside roots closest to the unit circle."""
    inside = roots[np.abs(roots) < 1.0]
    if inside.size < L:
        raise EstimationError(
            f"only {inside.size} polynomial roots strictly inside the unit circle, need {L}"
        )
    selected = inside[np.argsort(np.abs(inside))[::-1][:L]]
    angles, clamped = _phases_to_angles(np.angle(selected), geometry)
    order = np.argsort(angles)
    return angles[order], np.abs(selected)[order], clamped


def esprit(R: np.ndarray, L: int, geometry: ArrayGeometry) -> DoaEstimate:
    """Least-squares ESPRIT with maximally overlapping one-element-shift subarrays.

    Solves the rotational-invariance relation between the first and last
    ``M - 1`` rows of the signal basis in least squares; the phases of the
    rotation eigenvalues map to angles exactly like Root-MUSIC roots.

    Raises
    ------
    EstimationError
        If the upper subarray block of the signal basis is rank deficient.
    """
    _require_unambiguous(geometry)
    M = geometry.M
    if not 1 <= L < M - 1:
        raise ValueError(f"source count must satisfy 1 <= L < M - 1, got L={L}, M={M}")
    decomp = decompose(R, L)

    upper = decomp.signal_basis[:-1, :]
    lower = decomp.signal_basis[1:, :]
    rotation, _, rank, _ = np.linalg.lstsq(upper, lower, rcond=None)
    if rank < L:
        raise EstimationError("signal-subspace subarray block is rank deficient")

    eigenvalues = np.linalg.eigvals(rotation)
    angles, clamped = _phases_to_angles(np.angle(eigenvalues), geometry)
    order = np.argsort(angles)
    return DoaEstimate(
        angles=angles[order],
        method="esprit",
        diagnostics=eigenvalues[order],
        clamped=clamped,
    )
