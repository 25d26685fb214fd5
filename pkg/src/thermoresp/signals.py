"""Breathing-signal container, uniform resampling, and bandpass filtering."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import EmptySignalError, TooShortError

logger = logging.getLogger(__name__)

STAGE_RAW = "raw"
STAGE_UNIFORM = "uniform"
STAGE_FILTERED = "filtered"

#: uniform grids must be regular to within one microsecond
GRID_TOL_S = 1e-6


@dataclass(frozen=True)
class BreathingSignal:
    """Timestamped 1-D series in voxel-volume units.

    ``stage`` tracks progress through the pipeline (raw -> uniform ->
    filtered); ``fs`` is set once the signal lies on a uniform grid.
    """

    times: np.ndarray
    values: np.ndarray
    stage: str = STAGE_RAW
    fs: float | None = None

    def __post_init__(self):
        times = np.array(self.times, dtype=np.float64, copy=True)
        values = np.array(self.values, dtype=np.float64, copy=True)
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.shape != values.shape or times.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        if self.stage not in (STAGE_RAW, STAGE_UNIFORM, STAGE_FILTERED):
            raise ValueError(f"unknown stage {self.stage!r}")
        if self.stage in (STAGE_UNIFORM, STAGE_FILTERED):
            if self.fs is None or not (self.fs > 0):
                raise ValueError(f"stage {self.stage} requires a positive fs")
            if len(times) > 1:
                dt = np.diff(times)
                if np.max(np.abs(dt - 1.0 / self.fs)) > GRID_TOL_S:
                    raise ValueError("uniform stage requires a regular time grid")

    def __len__(self) -> int:
        return len(self.times)

    def duration(self) -> float:
        if len(self.times) == 0:
            return 0.0
        return float(self.times[-1] - self.times[0])


@dataclass(frozen=True)
class BandpassSpec:
    """Butterworth bandpass design for breathing frequencies.

    The default band, 0.1-0.85 Hz (6-51 breaths/min), covers resting to
    elevated adult breathing while excluding cardiac frequencies. ``order``
    is per pass; with ``zero_phase`` the filter runs forward and backward
    (no phase distortion, squared magnitude response).
    """

    low_hz: float = 0.1
    high_hz: float = 0.85
    order: int = 6
    zero_phase: bool = True

    def __post_init__(self):
        if not (0 < self.low_hz < self.high_hz):
            raise ValueError(
                f"need 0 < low_hz < high_hz, got ({self.low_hz}, {self.high_hz})"
            )
        if self.order < 1:
            raise ValueError(f"order must be at least 1, got {self.order}")

    def validate_for(self, fs: float) -> None:
        if self.high_hz >= fs / 2:
            raise ValueError(
                f"high_hz {self.high_hz} must stay below the Nyquist rate {fs / 2}"
            )

    def sos(self, fs: float) -> np.ndarray:
        self.validate_for(fs)
        return sps.butter(
            self.order, [self.low_hz, self.high_hz], btype="band", fs=fs, output="sos"
        )


def resample_uniform(sig: BreathingSignal, fs: float) -> BreathingSignal:
    """Linear interpolation onto the grid t0, t0 + 1/fs, ... <= t_end.

    No extrapolation: the grid stops at the last original sample.
    """
    if not (fs > 0):
        raise ValueError(f"fs must be positive, got {fs}")
    if len(sig) < 2:
        raise EmptySignalError(f"resampling needs at least 2 samples, got {len(sig)}")
    t0 = float(sig.times[0])
    span = float(sig.times[-1]) - t0
    n_steps = int(np.floor(span * fs + 1e-9))
    grid = t0 + np.arange(n_steps + 1, dtype=np.float64) / fs
    values = np.interp(grid, sig.times, sig.values)
    return BreathingSignal(times=grid, values=values, stage=STAGE_UNIFORM, fs=fs)


def bandpass(sig: BreathingSignal, spec: BandpassSpec) -> BreathingSignal:
    """Mean-removed Butterworth bandpass of a uniformly sampled signal.

    Zero-phase mode filters forward then backward; the causal single-pass
    mode (``zero_phase=False``) suits streaming but delays features by the
    filter group delay, which is noted on the log.
    """
    if sig.fs is None:
        raise ValueError("bandpass requires a uniformly resampled signal")
    n = len(sig)
    if n < 3 * spec.order:
        raise TooShortError(
            f"signal of {n} samples is shorter than 3x filter order ({3 * spec.order})"
        )
    sos = spec.sos(sig.fs)
    x = sig.values - np.mean(sig.values)
    if spec.zero_phase:
        padlen = min(3 * (2 * len(sos) + 1), n - 1)
        y = sps.sosfiltfilt(sos, x, padlen=padlen)
    else:
        logger.info(
            "causal bandpass: output delayed by the filter group delay "
            "(order %d, band %g-%g Hz)", spec.order, spec.low_hz, spec.high_hz,
        )
        zi = sps.sosfilt_zi(sos) * x[0]
        y, _ = sps.sosfilt(sos, x, zi=zi)
    return BreathingSignal(times=sig.times, values=y, stage=STAGE_FILTERED, fs=sig.fs)


def write_signal_csv(sig: BreathingSignal, path) -> None:
    """Write ``t_s,value`` rows at full float precision."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t_s", "value"])
        for t, v in zip(sig.times, sig.values):
            w.writerow([repr(float(t)), repr(float(v))])


def read_signal_csv(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["t_s", "value"]:
        raise ValueError(f"{path} is not a signal CSV")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]], dtype=np.float64)
    if data.size == 0:
        return np.array([]), np.array([])
    return data[:, 0], data[:, 1]
