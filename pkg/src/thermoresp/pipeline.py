"""Batch composition of the recovery pipeline and its run configuration."""

from __future__ import annotations

from dataclasses import dataclass, field

from .rate import RateEstimate, estimate_rate
from .rvs import Rvs, RvsParams, compute_rvs
from .signals import BandpassSpec, BreathingSignal, bandpass, resample_uniform
from .thermal import Roi, ThermalSequence, emissivity_correct
from .voxel import VoxelParams, integrate_sequence


@dataclass(frozen=True)
class PipelineConfig:
    """Aggregated stage parameters for batch runs and the replay server."""

    roi: Roi | None = None
    voxel: VoxelParams = field(default_factory=VoxelParams)
    band: BandpassSpec = field(default_factory=BandpassSpec)
    rate_window_s: float = 30.0
    rate_hop_s: float = 1.0
    rvs: RvsParams = field(default_factory=RvsParams)
    fs: float = 9.0
    emissivity: float | None = None  # None: use the sequence's own metadata
    speed: float = 1.0
    port: int = 8765

    def __post_init__(self):
        if not (self.fs > 0):
            raise ValueError(f"fs must be positive, got {self.fs}")
        if not (self.rate_window_s > 0 and self.rate_hop_s > 0):
            raise ValueError("rate window and hop must be positive")
        if self.speed < 0:
            raise ValueError(f"speed must be >= 0, got {self.speed}")
        if self.emissivity is not None and not (0.0 < self.emissivity <= 1.0):
            raise ValueError(f"emissivity must be in (0, 1], got {self.emissivity}")


@dataclass
class BatchResult:
    raw: BreathingSignal
    uniform: BreathingSignal
    filtered: BreathingSignal
    rates: list[RateEstimate]
    rvs: Rvs


def apply_emissivity(seq: ThermalSequence, emissivity: float | None = None) -> ThermalSequence:
    """Sequence with every frame emissivity-corrected (metadata value by default)."""
    eps = seq.meta.emissivity if emissivity is None else emissivity
    frames = [emissivity_correct(fr, eps) for fr in seq.frames]
    return ThermalSequence(meta=seq.meta, frames=frames)


def run_batch(seq: ThermalSequence, roi: Roi, cfg: PipelineConfig | None = None) -> BatchResult:
    """Emissivity correction, voxel integration, resampling, bandpass, rate
    estimation and spectrogram, in a row."""
    cfg = cfg or PipelineConfig()
    corrected = apply_emissivity(seq, cfg.emissivity)
    raw = integrate_sequence(corrected, roi, cfg.voxel)
    uniform = resample_uniform(raw, cfg.fs)
    filtered = bandpass(uniform, cfg.band)
    rates = estimate_rate(
        filtered, window_s=cfg.rate_window_s, hop_s=cfg.rate_hop_s,
        band=(cfg.band.low_hz, cfg.band.high_hz),
    )
    spectrogram = compute_rvs(filtered, cfg.rvs)
    return BatchResult(raw=raw, uniform=uniform, filtered=filtered,
                       rates=rates, rvs=spectrogram)
