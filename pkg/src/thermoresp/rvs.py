"""Breathing variability spectrogram: a normalized time-frequency image.

Columns are Hann-tapered, mean-removed, zero-padded FFT magnitudes of the
breathing signal, cropped to the displayed band. The batch form is min-max
normalized over the whole matrix; the incremental builder emits raw columns
and a running-max normalization, which by construction differs from the
batch normalization (the running maximum only ever grows).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import TooShortError
from .signals import BreathingSignal

PGM_MAXVAL = 255


@dataclass(frozen=True)
class RvsParams:
    """Spectrogram windowing.

    A 20 s Hann window spans at least two breath cycles at 6 breaths/min;
    zero-padding to 2048 points keeps bin spacing below 0.005 Hz at 9 Hz
    sampling.
    """

    win_s: float = 20.0
    hop_s: float = 1.0
    pad_to: int = 2048
    f_lo: float = 0.05
    f_hi: float = 1.0
    taper: str = "hann"
    log_magnitude: bool = False

    def __post_init__(self):
        if not (self.win_s > 0 and self.hop_s > 0):
            raise ValueError("win_s and hop_s must be positive")
        if self.pad_to < 2:
            raise ValueError(f"pad_to must be at least 2, got {self.pad_to}")
        if not (0 <= self.f_lo < self.f_hi):
            raise ValueError(f"need 0 <= f_lo < f_hi, got ({self.f_lo}, {self.f_hi})")
        if self.taper != "hann":
            raise ValueError(f"unsupported taper {self.taper!r}")


@dataclass(frozen=True)
class Rvs:
    """Spectrogram matrix (frequency rows x time columns) in [0, 1]."""

    magnitudes: np.ndarray
    freqs_hz: np.ndarray
    times_s: np.ndarray
    params: RvsParams


@dataclass(frozen=True)
class RvsColumn:
    """One incrementally emitted column: raw magnitudes plus the running-max
    normalized view at the moment of emission."""

    index: int
    t_center: float
    magnitudes: np.ndarray
    normalized: np.ndarray


def _grid(params: RvsParams, fs: float) -> tuple[int, int, np.ndarray, np.ndarray, np.ndarray]:
    if params.f_hi > fs / 2:
        raise ValueError(f"f_hi {params.f_hi} exceeds the Nyquist rate {fs / 2}")
    win_n = int(round(params.win_s * fs))
    hop_n = max(1, int(round(params.hop_s * fs)))
    if win_n < 2:
        raise ValueError(f"win_s {params.win_s} too small at fs {fs}")
    if params.pad_to < win_n:
        raise ValueError(f"pad_to {params.pad_to} smaller than the {win_n}-sample window")
    freqs = np.fft.rfftfreq(params.pad_to, 1.0 / fs)
    mask = (freqs >= params.f_lo) & (freqs <= params.f_hi)
    if not mask.any():
        raise ValueError(f"band [{params.f_lo}, {params.f_hi}] holds no bins at fs {fs}")
    taper = np.hanning(win_n)
    return win_n, hop_n, freqs[mask], mask, taper


def _one_column(segment: np.ndarray, taper: np.ndarray, pad_to: int,
                mask: np.ndarray, log_magnitude: bool) -> np.ndarray:
    w = (segment - np.mean(segment)) * taper
    mag = np.abs(np.fft.rfft(w, pad_to))[mask]
    if log_magnitude:
        mag = np.log1p(mag)
    return mag


def _minmax(matrix: np.ndarray) -> np.ndarray:
    lo = matrix.min()
    hi = matrix.max()
    if hi == lo:
        return np.zeros_like(matrix)
    return (matrix - lo) / (hi - lo)


def compute_rvs(sig: BreathingSignal, params: RvsParams | None = None) -> Rvs:
    """Batch spectrogram of a uniform breathing signal, normalized to [0, 1].

    A degenerate all-equal magnitude matrix maps to all zeros.
    """
    params = params or RvsParams()
    if sig.fs is None:
        raise ValueError("spectrogram requires a uniformly resampled signal")
    win_n, hop_n, freqs, mask, taper = _grid(params, sig.fs)
    if len(sig) < win_n:
        raise TooShortError(
            f"signal covers {len(sig) / sig.fs:.6g} s but the window needs "
            f"{params.win_s:.6g} s"
        )
    offsets = range(0, len(sig) - win_n + 1, hop_n)
    cols = [
        _one_column(sig.values[o : o + win_n], taper, params.pad_to, mask,
                    params.log_magnitude)
        for o in offsets
    ]
    half_span = 0.5 * (win_n - 1) / sig.fs
    times = np.array([float(sig.times[o]) + half_span for o in offsets])
    matrix = _minmax(np.column_stack(cols))
    return Rvs(magnitudes=matrix, freqs_hz=freqs, times_s=times, params=params)


class RvsBuilder:
    """Incremental spectrogram: push samples, get columns.

    A column is emitted exactly when its window boundary is crossed; the
    concatenated raw columns equal the batch computation on the same signal
    before normalization.
    """

    def __init__(self, params: RvsParams, fs: float, t0: float):
        self.params = params
        self.fs = fs
        self.t0 = t0
        self.win_n, self.hop_n, self.freqs_hz, self._mask, self._taper = _grid(params, fs)
        self._buf: list[float] = []
        self._base = 0  # absolute index of _buf[0]
        self._emitted = 0
        self.running_max = 0.0

    def push(self, samples) -> list[RvsColumn]:
        self._buf.extend(float(s) for s in np.atleast_1d(samples))
        out = []
        half_span = 0.5 * (self.win_n - 1) / self.fs
        while True:
            start = self._emitted * self.hop_n
            end = start + self.win_n
            if end > self._base + len(self._buf):
                break
            seg = np.array(self._buf[start - self._base : end - self._base])
            raw = _one_column(seg, self._taper, self.params.pad_to, self._mask,
                              self.params.log_magnitude)
            self.running_max = max(self.running_max, float(raw.max()))
            norm = raw / self.running_max if self.running_max > 0 else np.zeros_like(raw)
            t_center = self.t0 + start / self.fs + half_span
            out.append(RvsColumn(index=self._emitted, t_center=t_center,
                                 magnitudes=raw, normalized=norm))
            self._emitted += 1
            # drop samples no future window can reach
            next_start = self._emitted * self.hop_n
            if next_start > self._base:
                self._buf = self._buf[next_start - self._base :]
                self._base = next_start
        return out


def rvs_to_pgm(rvs: Rvs) -> bytes:
    """8-bit binary PGM; frequency increases upward, time rightward.

    Pixel values are ``round(255 * magnitude)`` with halves rounding up.
    """
    img = _to_gray(rvs)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n{PGM_MAXVAL}\n".encode("ascii")
    return header + img.tobytes()


def rvs_to_png(rvs: Rvs) -> bytes:
    """PNG export with pixel values identical to the PGM form."""
    from PIL import Image

    img = _to_gray(rvs)
    buf = io.BytesIO()
    Image.fromarray(img, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def _to_gray(rvs: Rvs) -> np.ndarray:
    if rvs.magnitudes.size == 0:
        raise ValueError("cannot render an empty spectrogram")
    gray = np.floor(PGM_MAXVAL * rvs.magnitudes + 0.5).astype(np.uint8)
    return gray[::-1, :]  # row 0 = highest frequency


def write_rvs_csv(rvs: Rvs, path) -> None:
    """Matrix export: first row carries column center times (t_s), first
    column carries bin center frequencies (f_hz)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["f_hz"] + [repr(float(t)) for t in rvs.times_s])
        for i, fq in enumerate(rvs.freqs_hz):
            w.writerow([repr(float(fq))] + [repr(float(v)) for v in rvs.magnitudes[i]])


def read_rvs_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read back (freqs_hz, times_s, magnitudes)."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0][0] != "f_hz":
        raise ValueError(f"{path} is not a spectrogram CSV")
    times = np.array([float(c) for c in rows[0][1:]])
    freqs = np.array([float(r[0]) for r in rows[1:]])
    mags = np.array([[float(c) for c in r[1:]] for r in rows[1:]])
    return freqs, times, mags
