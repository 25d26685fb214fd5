"""Sliding-window spectral breathing-rate estimation.

Each window is Hann-tapered, zero-padded to at least 4096 points, and the
rate is read off the periodogram's strongest in-band bin; ties break toward
the lowest frequency so results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooShortError
from .signals import BreathingSignal

MIN_FFT = 4096


@dataclass(frozen=True)
class RateEstimate:
    """One windowed estimate: center time, breaths per minute, and the
    fraction of in-band power carried by the peak bin."""

    t_center: float
    bpm: float
    confidence: float


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def pick_peak(power: np.ndarray) -> int:
    """Index of the maximum, first (lowest-frequency) entry on ties."""
    return int(np.argmax(power))


def window_rate(
    window: np.ndarray, taper: np.ndarray, nfft: int,
    freqs: np.ndarray, band_mask: np.ndarray,
) -> tuple[float, float]:
    """(bpm, confidence) of one tapered window against precomputed bins."""
    spec = np.abs(np.fft.rfft(window * taper, nfft)) ** 2
    in_band = spec[band_mask]
    k = pick_peak(in_band)
    total = float(in_band.sum())
    confidence = float(in_band[k]) / total if total > 0 else 1.0
    return 60.0 * float(freqs[band_mask][k]), confidence


def estimate_rate(
    sig: BreathingSignal,
    window_s: float = 30.0,
    hop_s: float = 1.0,
    band: tuple[float, float] = (0.1, 0.85),
) -> list[RateEstimate]:
    """Breathing rate over sliding windows of a uniform signal.

    Parameters
    ----------
    sig : BreathingSignal
        Uniformly sampled (typically filtered) signal.
    window_s, hop_s : float
        Window length and hop, seconds. A signal shorter than one window is
        an error rather than a silently partial answer.
    band : (low_hz, high_hz)
        Periodogram search band; estimates land in [60*low, 60*high] bpm.
    """
    if sig.fs is None:
        raise ValueError("rate estimation requires a uniformly resampled signal")
    fs = sig.fs
    n_win = int(round(window_s * fs))
    hop_n = max(1, int(round(hop_s * fs)))
    if n_win < 2:
        raise ValueError(f"window_s {window_s} too small at fs {fs}")
    if len(sig) < n_win:
        raise TooShortError(
            f"signal covers {len(sig) / fs:.6g} s but the window needs {window_s:.6g} s"
        )
    nfft = max(MIN_FFT, _next_pow2(n_win))
    freqs = np.fft.rfftfreq(nfft, 1.0 / fs)
    band_mask = (freqs >= band[0]) & (freqs <= band[1])
    if not band_mask.any():
        raise ValueError(f"band {band} contains no frequency bins at fs {fs}")
    taper = np.hanning(n_win)
    half_span = 0.5 * (n_win - 1) / fs

    out = []
    for off in range(0, len(sig) - n_win + 1, hop_n):
        bpm, conf = window_rate(
            sig.values[off : off + n_win], taper, nfft, freqs, band_mask
        )
        out.append(
            RateEstimate(t_center=float(sig.times[off]) + half_span, bpm=bpm, confidence=conf)
        )
    return out


def write_rate_csv(estimates: list[RateEstimate], path) -> None:
    """Write ``t_center_s,bpm,confidence`` rows at full float precision."""
    import csv

    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t_center_s", "bpm", "confidence"])
        for est in estimates:
            w.writerow([repr(est.t_center), repr(est.bpm), repr(est.confidence)])


def read_rate_csv(path):
    import csv

    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["t_center_s", "bpm", "confidence"]:
        raise ValueError(f"{path} is not a rate CSV")
    return [
        RateEstimate(t_center=float(a), bpm=float(b), confidence=float(c))
        for a, b, c in rows[1:]
    ]
