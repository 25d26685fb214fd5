"""Breathing-rate recovery from radiometric thermal image sequences."""

from .errors import (
    EmptySignalError,
    RoiBoundsError,
    TooShortError,
    TseqDecodeError,
    UnusableFrameError,
)
from .pipeline import BatchResult, PipelineConfig, apply_emissivity, run_batch
from .rate import RateEstimate, estimate_rate
from .rvs import Rvs, RvsBuilder, RvsColumn, RvsParams, compute_rvs, rvs_to_pgm, rvs_to_png
from .signals import BandpassSpec, BreathingSignal, bandpass, resample_uniform
from .streaming import StreamEvents, StreamingEstimator
from .synth import GroundTruth, RateProfile, SynthConfig, synthesize_sequence
from .thermal import (
    TEMP_MAX_K,
    TEMP_MIN_K,
    Roi,
    SequenceMeta,
    ThermalFrame,
    ThermalSequence,
    emissivity_correct,
)
from .tseq import decode_sequence, encode_sequence, read_tseq, write_tseq
from .voxel import VoxelParams, integrate_sequence, voxel_integrate_frame

__version__ = "0.1.0"

__all__ = [
    "BandpassSpec",
    "BatchResult",
    "BreathingSignal",
    "EmptySignalError",
    "GroundTruth",
    "PipelineConfig",
    "RateEstimate",
    "RateProfile",
    "Roi",
    "RoiBoundsError",
    "Rvs",
    "RvsBuilder",
    "RvsColumn",
    "RvsParams",
    "SequenceMeta",
    "StreamEvents",
    "StreamingEstimator",
    "SynthConfig",
    "TEMP_MAX_K",
    "TEMP_MIN_K",
    "ThermalFrame",
    "ThermalSequence",
    "TooShortError",
    "TseqDecodeError",
    "UnusableFrameError",
    "VoxelParams",
    "apply_emissivity",
    "bandpass",
    "compute_rvs",
    "decode_sequence",
    "emissivity_correct",
    "encode_sequence",
    "estimate_rate",
    "integrate_sequence",
    "read_tseq",
    "resample_uniform",
    "run_batch",
    "rvs_to_pgm",
    "rvs_to_png",
    "synthesize_sequence",
    "voxel_integrate_frame",
    "write_tseq",
]
