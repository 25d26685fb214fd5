"""Synthetic nostril-breathing sequences with exact ground truth.

The generator paints a breathing-modulated temperature patch over a uniform
background and returns, alongside the frames, the exact phase function and
instantaneous rate series used to drive the modulation. It is the oracle
against which the whole recovery pipeline is validated.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .thermal import Roi, SequenceMeta, ThermalFrame, ThermalSequence


@dataclass(frozen=True)
class RateProfile:
    """Breathing rate over time: constant, or a linear chirp start -> end.

    The chirp spans the full sequence duration; rates are breaths per minute.
    """

    bpm_start: float
    bpm_end: float | None = None

    def __post_init__(self):
        end = self.bpm_start if self.bpm_end is None else self.bpm_end
        for v in (self.bpm_start, end):
            if not (0.0 < v <= 60.0):
                raise ValueError(f"breathing rate must be in (0, 60] bpm, got {v}")

    def rate_bpm(self, t: float, duration: float) -> float:
        if self.bpm_end is None or duration <= 0:
            return self.bpm_start
        return self.bpm_start + (self.bpm_end - self.bpm_start) * (t / duration)

    def phase_rad(self, t: float, duration: float) -> float:
        """Integral of the angular rate: phi(t) with phi'(t) = 2*pi*rate(t)/60."""
        if self.bpm_end is None or duration <= 0:
            return 2.0 * math.pi / 60.0 * self.bpm_start * t
        slope = (self.bpm_end - self.bpm_start) / duration
        return 2.0 * math.pi / 60.0 * (self.bpm_start * t + 0.5 * slope * t * t)

    def describe(self) -> str:
        if self.bpm_end is None:
            return f"{self.bpm_start:g} bpm"
        return f"{self.bpm_start:g}->{self.bpm_end:g} bpm"


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of a synthetic sequence.

    ``amplitude`` is the peak thermal swing at the nostril patch (kelvin),
    ``drift`` a linear baseline drift in kelvin per minute, ``jitter_sd`` the
    frame-timestamp jitter. Equal configs (including ``seed``) produce
    bit-identical sequences.
    """

    duration: float
    rate_profile: RateProfile
    fps: float = 9.0
    amplitude: float = 0.3
    baseline: float = 306.0
    ambient: float = 295.0
    noise_sd: float = 0.0
    drift: float = 0.0
    nostril_roi: Roi = field(default_factory=lambda: Roi(70, 70, 20, 12))
    jitter_sd: float = 0.0
    seed: int = 0
    width: int = 160
    height: int = 120

    def __post_init__(self):
        if not (self.duration > 0):
            raise ValueError(f"duration must be positive, got {self.duration}")
        if not (self.fps > 0):
            raise ValueError(f"fps must be positive, got {self.fps}")
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be non-negative, got {self.amplitude}")
        if self.noise_sd < 0 or self.jitter_sd < 0:
            raise ValueError("noise_sd and jitter_sd must be non-negative")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame dimensions must be positive")
        roi = self.nostril_roi
        if roi.x + roi.w > self.width or roi.y + roi.h > self.height:
            raise ValueError(
                f"nostril_roi {roi} outside {self.width}x{self.height} frame"
            )


@dataclass(frozen=True)
class GroundTruth:
    """Exact per-frame truth of a synthetic sequence."""

    times_s: np.ndarray
    phase_rad: np.ndarray
    rate_bpm: np.ndarray
    profile: RateProfile
    duration: float

    def rate_at(self, t: float) -> float:
        return self.profile.rate_bpm(t, self.duration)

    def phase_at(self, t: float) -> float:
        return self.profile.phase_rad(t, self.duration)


def _frame_times(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    n = int(math.floor(cfg.duration * cfg.fps))
    base = np.arange(n, dtype=np.float64) / cfg.fps
    if cfg.jitter_sd <= 0 or n == 0:
        return base
    # clip jitter to +-45% of the frame period so timestamps stay strictly
    # increasing; frame 0 may only jitter forward to keep t >= 0
    limit = 0.45 / cfg.fps
    jitter = np.clip(rng.normal(0.0, cfg.jitter_sd, size=n), -limit, limit)
    jitter[0] = abs(jitter[0])
    return base + jitter


def synthesize_sequence(cfg: SynthConfig) -> tuple[ThermalSequence, GroundTruth]:
    """Generate a breathing sequence and its exact ground truth.

    Nostril-patch pixels carry
    ``baseline + drift*t/60 + amplitude*sin(phase(t)) + noise``; everything
    else is ``ambient + noise``. Noise is Gaussian per pixel. The random
    stream is consumed in a fixed order (all timestamp jitter first, then one
    noise field per frame), so equal configs give equal output.
    """
    rng = np.random.default_rng(cfg.seed)
    times = _frame_times(cfg, rng)
    n = len(times)
    roi = cfg.nostril_roi

    phase = np.array([cfg.rate_profile.phase_rad(t, cfg.duration) for t in times])
    rates = np.array([cfg.rate_profile.rate_bpm(t, cfg.duration) for t in times])

    frames = []
    for i in range(n):
        t = times[i]
        pixels = np.full((cfg.height, cfg.width), cfg.ambient, dtype=np.float64)
        nostril = cfg.baseline + cfg.drift * (t / 60.0) + cfg.amplitude * math.sin(phase[i])
        roi.block(pixels)[:, :] = nostril
        if cfg.noise_sd > 0:
            pixels += rng.normal(0.0, cfg.noise_sd, size=pixels.shape)
        frames.append(ThermalFrame(timestamp=t, pixels=pixels))

    meta = SequenceMeta(
        width=cfg.width, height=cfg.height, nominal_fps=cfg.fps,
        emissivity=0.98, frame_count=n,
    )
    seq = ThermalSequence(meta=meta, frames=frames)
    truth = GroundTruth(
        times_s=times, phase_rad=phase, rate_bpm=rates,
        profile=cfg.rate_profile, duration=cfg.duration,
    )
    return seq, truth


def write_ground_truth(truth: GroundTruth, path) -> None:
    """Write the per-frame truth sidecar: ``t_s,phase_rad,rate_bpm``."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t_s", "phase_rad", "rate_bpm"])
        for t, p, r in zip(truth.times_s, truth.phase_rad, truth.rate_bpm):
            w.writerow([repr(float(t)), repr(float(p)), repr(float(r))])


def read_ground_truth(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read a truth sidecar back as (times_s, phase_rad, rate_bpm) arrays."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["t_s", "phase_rad", "rate_bpm"]:
        raise ValueError(f"{path} is not a ground-truth sidecar")
    data = np.array([[float(c) for c in row] for row in rows[1:]], dtype=np.float64)
    if data.size == 0:
        return np.array([]), np.array([]), np.array([])
    return data[:, 0], data[:, 1], data[:, 2]
