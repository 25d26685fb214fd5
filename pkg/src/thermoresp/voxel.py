"""Voxel-count recovery of the breathing signal.

Each valid ROI pixel contributes an integer stack of unit-temperature voxels:
``floor(max(0, T - floor) / quantum)``. Summing the stacks over the ROI turns
exhale/inhale temperature swings into a one-dimensional count series.

Quantization boundaries are resolved with a tiny upward tolerance
(``BOUNDARY_EPS``) so that temperatures specified at centikelvin-scale
decimal resolution land on the intended voxel count despite float64
representation error (e.g. a pixel 0.03 K above the floor at quantum 0.01 K
counts exactly 3 voxels).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import EmptySignalError, UnusableFrameError
from .signals import BreathingSignal
from .thermal import TEMP_MAX_K, TEMP_MIN_K, Roi, ThermalFrame, ThermalSequence

#: relative tolerance applied before the integer floor at voxel boundaries
BOUNDARY_EPS = 1e-9

FLOOR_WINDOW_MIN = "window-min"
FLOOR_FIXED = "fixed"


@dataclass(frozen=True)
class VoxelParams:
    """Voxel quantum and integration-floor policy.

    ``window-min`` keeps the floor at the minimum valid ROI temperature seen
    over a sliding backward window, which tracks slow ambient drift;
    ``fixed`` pins it to ``fixed_floor`` for reproducible unit math.
    """

    quantum: float = 0.01
    floor_mode: str = FLOOR_WINDOW_MIN
    fixed_floor: float | None = None
    window_s: float = 30.0

    def __post_init__(self):
        if not (self.quantum > 0):
            raise ValueError(f"quantum must be positive, got {self.quantum}")
        if self.floor_mode not in (FLOOR_WINDOW_MIN, FLOOR_FIXED):
            raise ValueError(f"unknown floor_mode {self.floor_mode!r}")
        if self.floor_mode == FLOOR_FIXED:
            if self.fixed_floor is None:
                raise ValueError("fixed floor_mode requires fixed_floor")
            if not (TEMP_MIN_K <= self.fixed_floor <= TEMP_MAX_K):
                raise ValueError(f"fixed_floor {self.fixed_floor} outside valid range")
        if not (self.window_s > 0):
            raise ValueError(f"window_s must be positive, got {self.window_s}")


def count_voxels(values: np.ndarray, floor: float, quantum: float) -> int:
    """Total voxel stack of the given valid temperatures above ``floor``."""
    stacks = np.floor(np.maximum(values - floor, 0.0) / quantum + BOUNDARY_EPS)
    return int(stacks.sum())


def _roi_valid(frame: ThermalFrame, roi: Roi):
    block = roi.block(frame.pixels)
    mask = ~np.isnan(block)
    return block, mask, int(mask.sum())


def roi_is_usable(frame: ThermalFrame, roi: Roi) -> bool:
    """A frame is usable when at least half of its ROI pixels are valid."""
    block = roi.block(frame.pixels)
    n_valid = int((~np.isnan(block)).sum())
    return 2 * n_valid >= block.size


def voxel_integrate_frame(
    frame: ThermalFrame, roi: Roi, quantum: float, floor: float
) -> int:
    """Voxel count of one frame's ROI above a given floor temperature."""
    if not (quantum > 0):
        raise ValueError(f"quantum must be positive, got {quantum}")
    roi.check_within(frame.width, frame.height)
    block, mask, n_valid = _roi_valid(frame, roi)
    if 2 * n_valid < block.size:
        raise UnusableFrameError(
            f"ROI has {n_valid}/{block.size} valid pixels (needs at least half)"
        )
    return count_voxels(block[mask], floor, quantum)


class FloorTracker:
    """Sliding-window minimum of per-frame ROI temperatures.

    Fed one (time, roi_min) pair per frame; ``current()`` is the minimum over
    frames whose time lies in [t_latest - window_s, t_latest]. Uses the usual
    monotone deque, O(1) amortized per frame.
    """

    def __init__(self, window_s: float):
        self.window_s = window_s
        self._dq: deque[tuple[float, float]] = deque()

    def update(self, t: float, roi_min: float | None) -> None:
        if roi_min is not None and not np.isnan(roi_min):
            while self._dq and self._dq[-1][1] >= roi_min:
                self._dq.pop()
            self._dq.append((t, roi_min))
        cutoff = t - self.window_s
        while self._dq and self._dq[0][0] < cutoff:
            self._dq.popleft()

    def current(self) -> float:
        if not self._dq:
            return np.nan
        return self._dq[0][1]


def integrate_sequence(
    seq: ThermalSequence, roi: Roi, params: VoxelParams
) -> BreathingSignal:
    """Per-frame voxel counts of a sequence as a raw breathing signal.

    Frames whose ROI is mostly invalid are skipped, leaving a gap in the
    timestamps. In window-min mode every frame's valid ROI minimum feeds the
    floor window, including skipped frames.
    """
    roi.check_within(seq.meta.width, seq.meta.height)
    tracker = FloorTracker(params.window_s)
    times: list[float] = []
    values: list[float] = []
    for fr in seq.frames:
        block, mask, n_valid = _roi_valid(fr, roi)
        roi_min = float(block[mask].min()) if n_valid else None
        tracker.update(fr.timestamp, roi_min)
        if 2 * n_valid < block.size:
            continue
        if params.floor_mode == FLOOR_FIXED:
            floor = params.fixed_floor
        else:
            floor = tracker.current()
        times.append(fr.timestamp)
        values.append(count_voxels(block[mask], floor, params.quantum))
    if len(times) < 2:
        raise EmptySignalError(
            f"only {len(times)} usable frames; a breathing signal needs at least 2"
        )
    return BreathingSignal(
        times=np.array(times), values=np.array(values, dtype=np.float64), stage="raw"
    )
