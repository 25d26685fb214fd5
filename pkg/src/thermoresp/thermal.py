"""Radiometric frame/sequence data model and emissivity correction.

Temperatures are absolute kelvin. Dead or out-of-range pixels are stored as
NaN (the INVALID marker) and excluded from all downstream statistics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RoiBoundsError

#: usable temperature range for a consumer thermal camera, kelvin
TEMP_MIN_K = 233.15
TEMP_MAX_K = 433.15

#: cell quantum of the storage format, kelvin
CENTIKELVIN = 0.01


def _sanitized_pixels(pixels) -> np.ndarray:
    """Return a read-only float64 copy with out-of-range values set to NaN."""
    arr = np.array(pixels, dtype=np.float64, copy=True)
    if arr.ndim != 2:
        raise ValueError(f"pixels must be a 2-D matrix, got ndim={arr.ndim}")
    with np.errstate(invalid="ignore"):
        bad = ~np.isfinite(arr) | (arr < TEMP_MIN_K) | (arr > TEMP_MAX_K)
    arr[bad] = np.nan
    arr.flags.writeable = False
    return arr


def _trusted_frame(timestamp: float, pixels: np.ndarray) -> "ThermalFrame":
    """Frame constructor for hot paths whose pixels are already sanitized
    (fresh float64 matrix, out-of-range cells set to NaN). Skips the
    defensive copy; takes ownership of the array."""
    pixels.flags.writeable = False
    frame = object.__new__(ThermalFrame)
    object.__setattr__(frame, "timestamp", timestamp)
    object.__setattr__(frame, "pixels", pixels)
    return frame


@dataclass(frozen=True)
class ThermalFrame:
    """One timestamped radiometric image.

    ``timestamp`` is seconds since sequence start. ``pixels`` is a
    (height, width) float64 matrix in kelvin; NaN marks invalid cells.
    Values outside [TEMP_MIN_K, TEMP_MAX_K] are stored as invalid.
    """

    timestamp: float
    pixels: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.timestamp) or self.timestamp < 0:
            raise ValueError(f"timestamp must be non-negative, got {self.timestamp}")
        object.__setattr__(self, "pixels", _sanitized_pixels(self.pixels))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def valid_mask(self) -> np.ndarray:
        return ~np.isnan(self.pixels)

    def __eq__(self, other):
        if not isinstance(other, ThermalFrame):
            return NotImplemented
        return (
            self.timestamp == other.timestamp
            and self.pixels.shape == other.pixels.shape
            and np.array_equal(self.pixels, other.pixels, equal_nan=True)
        )


@dataclass(frozen=True)
class SequenceMeta:
    """Acquisition metadata for a frame sequence.

    Defaults mirror a low-cost phone-mounted thermal camera: 160x120 pixels,
    at most 9 frames per second, skin emissivity 0.98.
    """

    width: int = 160
    height: int = 120
    nominal_fps: float = 9.0
    emissivity: float = 0.98
    frame_count: int = 0

    def __post_init__(self):
        if self.width < 0 or self.height < 0:
            raise ValueError("width and height must be non-negative")
        if not (self.nominal_fps > 0):
            raise ValueError(f"nominal_fps must be positive, got {self.nominal_fps}")
        if not (0.0 < self.emissivity <= 1.0):
            raise ValueError(f"emissivity must be in (0, 1], got {self.emissivity}")
        if self.frame_count < 0:
            raise ValueError("frame_count must be non-negative")


@dataclass(frozen=True)
class ThermalSequence:
    """Ordered frames plus metadata; the unit of file I/O and replay."""

    meta: SequenceMeta
    frames: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        if self.meta.frame_count != len(self.frames):
            raise ValueError(
                f"meta.frame_count={self.meta.frame_count} but sequence holds "
                f"{len(self.frames)} frames"
            )
        last_t = -np.inf
        for i, fr in enumerate(self.frames):
            if fr.width != self.meta.width or fr.height != self.meta.height:
                raise ValueError(
                    f"frame {i} is {fr.width}x{fr.height}, expected "
                    f"{self.meta.width}x{self.meta.height}"
                )
            if fr.timestamp <= last_t:
                raise ValueError(f"frame {i} timestamp {fr.timestamp} not increasing")
            last_t = fr.timestamp

    def __len__(self) -> int:
        return len(self.frames)

    def duration(self) -> float:
        if not self.frames:
            return 0.0
        return self.frames[-1].timestamp - self.frames[0].timestamp

    @classmethod
    def from_frames(cls, frames, nominal_fps: float = 9.0, emissivity: float = 0.98):
        frames = tuple(frames)
        if frames:
            h, w = frames[0].pixels.shape
        else:
            w, h = 160, 120
        meta = SequenceMeta(
            width=w, height=h, nominal_fps=nominal_fps,
            emissivity=emissivity, frame_count=len(frames),
        )
        return cls(meta=meta, frames=frames)


@dataclass(frozen=True)
class Roi:
    """Axis-aligned pixel rectangle, e.g. over the nostrils.

    (x, y) is the top-left corner; at least 4 pixels of area are required
    for a meaningful thermal distribution.
    """

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            v = getattr(self, name)
            if int(v) != v:
                raise ValueError(f"roi {name} must be an integer, got {v}")
            object.__setattr__(self, name, int(v))
        if self.x < 0 or self.y < 0:
            raise ValueError(f"roi origin must be non-negative, got ({self.x}, {self.y})")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"roi extent must be positive, got {self.w}x{self.h}")
        if self.w * self.h < 4:
            raise ValueError(f"roi must cover at least 4 pixels, got {self.w * self.h}")

    def check_within(self, width: int, height: int) -> None:
        if self.x >= width:
            raise RoiBoundsError("left", f"roi x={self.x} is beyond frame width {width}")
        if self.y >= height:
            raise RoiBoundsError("top", f"roi y={self.y} is beyond frame height {height}")
        if self.x + self.w > width:
            raise RoiBoundsError(
                "right", f"roi x+w={self.x + self.w} exceeds frame width {width}"
            )
        if self.y + self.h > height:
            raise RoiBoundsError(
                "bottom", f"roi y+h={self.y + self.h} exceeds frame height {height}"
            )

    def block(self, pixels: np.ndarray) -> np.ndarray:
        """View of this rectangle inside a (height, width) pixel matrix."""
        return pixels[self.y : self.y + self.h, self.x : self.x + self.w]


def emissivity_correct(frame: ThermalFrame, emissivity: float) -> ThermalFrame:
    """Map apparent blackbody temperatures to surface temperatures.

    Uses the total-radiation relation ``T_true = T_app * emissivity**(-1/4)``
    (Stefan-Boltzmann over the full band). Invalid pixels pass through; results
    that leave the usable temperature range become invalid.

    Parameters
    ----------
    frame : ThermalFrame
        Apparent-temperature frame.
    emissivity : float
        Surface emissivity in (0, 1]; 1.0 is the identity.
    """
    if not (0.0 < emissivity <= 1.0):
        raise ValueError(f"emissivity must be in (0, 1], got {emissivity}")
    factor = emissivity ** -0.25
    corrected = frame.pixels * factor  # NaN propagates, invalid stays invalid
    with np.errstate(invalid="ignore"):
        out_of_range = (corrected < TEMP_MIN_K) | (corrected > TEMP_MAX_K)
    corrected[out_of_range] = np.nan
    return _trusted_frame(frame.timestamp, corrected)
