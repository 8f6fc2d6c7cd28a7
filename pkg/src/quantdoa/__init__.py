"""Simulation toolkit for direction-of-arrival estimation behind low-resolution ADCs.

The package models a uniform linear array whose per-antenna samples pass
through b-bit converters, estimates source directions from the quantized
snapshots with subspace methods (spectral MUSIC, Root-MUSIC, LS-ESPRIT),
and compares Monte Carlo accuracy against a closed-form Cramer-Rao bound
and its quantization-loss factor.
"""

from quantdoa.array_model import (
    ArrayGeometry,
    SnapshotMatrix,
    SourceSet,
    derive_rng,
    generate_snapshots,
    mean_square_aperture,
    steering_vector,
)
from quantdoa.crlb import (
    OperatingPoint,
    crlb,
    effective_snr,
    fim_closed_form,
    fim_numeric,
    performance_loss_db,
)
from quantdoa.estimators import (
    DoaEstimate,
    EstimationError,
    SubspaceDecomposition,
    decompose,
    esprit,
    music,
    music_pseudospectrum,
    root_music,
    sample_covariance,
)
from quantdoa.harness import ExperimentConfig, SweepResult, rmse
from quantdoa.quantizer import (
    Codebook,
    NoiseCovariance,
    QuantizerSpec,
    aqnm_transform,
    design_lloyd_max,
    distortion_factor,
    quantization_noise_covariance,
    quantize_snapshots,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "Codebook",
    "DoaEstimate",
    "EstimationError",
    "ExperimentConfig",
    "NoiseCovariance",
    "OperatingPoint",
    "QuantizerSpec",
    "SnapshotMatrix",
    "SourceSet",
    "SubspaceDecomposition",
    "SweepResult",
    "aqnm_transform",
    "crlb",
    "decompose",
    "derive_rng",
    "design_lloyd_max",
    "distortion_factor",
    "effective_snr",
    "esprit",
    "fim_closed_form",
    "fim_numeric",
    "generate_snapshots",
    "mean_square_aperture",
    "music",
    "music_pseudospectrum",
    "performance_loss_db",
    "quantization_noise_covariance",
    "quantize_snapshots",
    "rmse",
    "root_music",
    "sample_covariance",
    "steering_vector",
]
