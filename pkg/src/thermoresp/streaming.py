"""Incremental breathing estimation, one frame at a time.

The streaming estimator mirrors the batch pipeline: voxel counts with a
sliding floor, interpolation onto a uniform grid, zero-phase bandpass, then
windowed rate estimates and spectrogram columns. Uniform samples are stable
once emitted (interpolation only looks at the two bracketing raw samples), so
the emitted signal equals the batch resampling bit for bit.

Rates and spectrogram columns need the filtered signal; because the
zero-phase filter is non-causal, the estimator refilters the prefix consumed
so far whenever a window completes. Each emitted rate therefore equals the
last estimate of the batch pipeline run on exactly that prefix, which is the
tested contract. Spectrogram columns are emitted once, computed from the
prefix available at their boundary, with a running-max normalization.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .rate import MIN_FFT, RateEstimate, _next_pow2, window_rate
from .rvs import RvsColumn, RvsParams, _grid, _one_column
from .signals import STAGE_UNIFORM, BandpassSpec, BreathingSignal, bandpass
from .thermal import Roi, ThermalFrame
from .voxel import FLOOR_FIXED, FloorTracker, VoxelParams, count_voxels

GRID_EPS = 1e-9


@dataclass
class StreamEvents:
    """Everything one pushed frame produced."""

    signals: list[tuple[float, float]] = field(default_factory=list)
    rates: list[RateEstimate] = field(default_factory=list)
    rvs_columns: list[RvsColumn] = field(default_factory=list)


class StreamingEstimator:
    """Single-writer pipeline state machine; one producer pushes frames."""

    def __init__(
        self,
        roi: Roi,
        voxel: VoxelParams | None = None,
        band: BandpassSpec | None = None,
        fs: float = 9.0,
        rate_window_s: float = 30.0,
        rate_hop_s: float = 1.0,
        rvs: RvsParams | None = None,
    ):
        self.roi = roi
        self.voxel = voxel or VoxelParams()
        self.band = band or BandpassSpec()
        self.fs = fs
        self.rvs_params = rvs or RvsParams()
        self.band.validate_for(fs)

        self._tracker = FloorTracker(self.voxel.window_s)
        self._raw_t: list[float] = []
        self._raw_v: list[float] = []
        self._uni: list[float] = []
        self._t0: float | None = None
        self._next_k = 0
        self._last_t = -np.inf

        self._rate_win = int(round(rate_window_s * fs))
        self._rate_hop = max(1, int(round(rate_hop_s * fs)))
        self._rates_emitted = 0
        self._nfft = max(MIN_FFT, _next_pow2(self._rate_win))
        freqs = np.fft.rfftfreq(self._nfft, 1.0 / fs)
        self._band_mask = (freqs >= self.band.low_hz) & (freqs <= self.band.high_hz)
        self._freqs = freqs
        self._taper = np.hanning(self._rate_win)

        (self._rvs_win, self._rvs_hop, self.rvs_freqs_hz,
         self._rvs_mask, self._rvs_taper) = _grid(self.rvs_params, fs)
        self._cols_emitted = 0
        self._rvs_running_max = 0.0

    # -- frame intake -----------------------------------------------------

    def push_frame(self, frame: ThermalFrame) -> StreamEvents:
        events = StreamEvents()
        if frame.timestamp <= self._last_t:
            raise ValueError("frames must arrive with strictly increasing timestamps")
        self._last_t = frame.timestamp
        self.roi.check_within(frame.width, frame.height)

        block = self.roi.block(frame.pixels)
        mask = ~np.isnan(block)
        n_valid = int(mask.sum())
        roi_min = float(block[mask].min()) if n_valid else None
        self._tracker.update(frame.timestamp, roi_min)
        if 2 * n_valid < block.size:
            return events  # unusable frame: gap in the raw signal

        if self.voxel.floor_mode == FLOOR_FIXED:
            floor = self.voxel.fixed_floor
        else:
            floor = self._tracker.current()
        self._raw_t.append(frame.timestamp)
        self._raw_v.append(float(count_voxels(block[mask], floor, self.voxel.quantum)))

        if self._t0 is None:
            self._t0 = frame.timestamp
        self._emit_uniform(frame.timestamp, events)
        return events

    # -- uniform grid -----------------------------------------------------

    def _emit_uniform(self, t_latest: float, events: StreamEvents) -> None:
        if len(self._raw_t) < 2:
            # a single raw sample can anchor only its own grid point, and the
            # batch grid needs the final extent anyway; wait for a bracket
            k_max = -1
        else:
            k_max = int(np.floor((t_latest - self._t0) * self.fs + GRID_EPS))
        while self._next_k <= k_max:
            g = self._t0 + self._next_k / self.fs
            j = bisect_right(self._raw_t, g) - 1
            j = min(max(j, 0), len(self._raw_t) - 2)
            v = float(np.interp(g, self._raw_t[j : j + 2], self._raw_v[j : j + 2]))
            self._uni.append(v)
            events.signals.append((g, v))
            self._next_k += 1
            self._on_uniform_sample(events)

    def uniform_times(self) -> np.ndarray:
        return self._t0 + np.arange(len(self._uni), dtype=np.float64) / self.fs

    def uniform_signal(self) -> BreathingSignal:
        return BreathingSignal(
            times=self.uniform_times(), values=np.array(self._uni),
            stage=STAGE_UNIFORM, fs=self.fs,
        )

    # -- window boundaries ------------------------------------------------

    def _on_uniform_sample(self, events: StreamEvents) -> None:
        m = len(self._uni)
        rate_due = m >= self._rate_win and (m - self._rate_win) % self._rate_hop == 0
        col_due = m >= self._rvs_win and (m - self._rvs_win) % self._rvs_hop == 0
        if not (rate_due or col_due):
            return
        filtered = bandpass(self.uniform_signal(), self.band).values

        if rate_due:
            off = m - self._rate_win
            bpm, conf = window_rate(
                filtered[off:m], self._taper, self._nfft, self._freqs, self._band_mask
            )
            t_center = self._t0 + off / self.fs + 0.5 * (self._rate_win - 1) / self.fs
            events.rates.append(RateEstimate(t_center=t_center, bpm=bpm, confidence=conf))
            self._rates_emitted += 1

        if col_due:
            off = m - self._rvs_win
            raw = _one_column(
                filtered[off:m], self._rvs_taper, self.rvs_params.pad_to,
                self._rvs_mask, self.rvs_params.log_magnitude,
            )
            self._rvs_running_max = max(self._rvs_running_max, float(raw.max()))
            norm = (raw / self._rvs_running_max if self._rvs_running_max > 0
                    else np.zeros_like(raw))
            t_center = self._t0 + off / self.fs + 0.5 * (self._rvs_win - 1) / self.fs
            events.rvs_columns.append(
                RvsColumn(index=self._cols_emitted, t_center=t_center,
                          magnitudes=raw, normalized=norm)
            )
            self._cols_emitted += 1
