"""Bit-exact .tseq sequence codec.

Layout (all integers little-endian):

    header, 20 bytes:
        magic        4 bytes  b"TSEQ"
        version      u16      currently 1
        width        u16
        height       u16
        frame_count  u32
        nominal_fps  f32      IEEE-754
        emissivity   u16      emissivity * 10_000  (0.98 -> 9800)
    per frame:
        timestamp    u64      microseconds since sequence start
        cells        width*height u16, row-major from the top-left corner,
                     centikelvin (kelvin * 100, rounded half-up);
                     0 marks an invalid cell, valid range [23315, 43315]

Timestamps are therefore stored at microsecond resolution, temperatures at
centikelvin resolution, and the frame rate at float32 precision; round-trips
are exact for sequences already quantized to those resolutions.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import TseqDecodeError
from .thermal import SequenceMeta, ThermalSequence, _trusted_frame

MAGIC = b"TSEQ"
VERSION = 1
HEADER = struct.Struct("<4sHHHIfH")
HEADER_SIZE = HEADER.size  # 20
FRAME_TS = struct.Struct("<Q")

CELL_INVALID = 0
CELL_MIN = 23315
CELL_MAX = 43315


def _round_half_up(x: np.ndarray | float):
    return np.floor(x + 0.5)


def encode_sequence(seq: ThermalSequence) -> bytes:
    """Serialize a sequence to .tseq bytes.

    The sequence invariants (matching dimensions, strictly increasing
    timestamps) are re-checked; violations are rejected with the offending
    frame index. Timestamps closer together than 1 microsecond cannot be
    represented and are rejected.
    """
    meta = seq.meta
    if not (0 <= meta.width <= 0xFFFF and 0 <= meta.height <= 0xFFFF):
        raise ValueError(f"frame dimensions {meta.width}x{meta.height} exceed u16")
    if len(seq.frames) > 0xFFFFFFFF:
        raise ValueError("frame count exceeds u32")
    emis = int(_round_half_up(meta.emissivity * 10_000.0))
    if not (1 <= emis <= 10_000):
        raise ValueError(f"emissivity {meta.emissivity} not representable")

    out = bytearray()
    out += HEADER.pack(
        MAGIC, VERSION, meta.width, meta.height,
        len(seq.frames), meta.nominal_fps, emis,
    )
    prev_us = -1
    for i, fr in enumerate(seq.frames):
        if fr.width != meta.width or fr.height != meta.height:
            raise ValueError(f"frame {i} dimensions differ from sequence metadata")
        ts_us = int(_round_half_up(fr.timestamp * 1e6))
        if ts_us <= prev_us:
            raise ValueError(
                f"frame {i} timestamp not increasing at microsecond resolution"
            )
        prev_us = ts_us
        out += FRAME_TS.pack(ts_us)
        cells = np.zeros(fr.pixels.shape, dtype="<u2")
        valid = fr.valid_mask()
        cells[valid] = _round_half_up(fr.pixels[valid] * 100.0).astype("<u2")
        out += cells.tobytes()
    return bytes(out)


def decode_sequence(data: bytes) -> ThermalSequence:
    """Parse .tseq bytes into a sequence.

    Safe on arbitrary input: any malformed stream raises TseqDecodeError
    naming the byte offset and cause; nothing is allocated before the
    declared payload length has been verified.
    """
    if len(data) < 4 or data[:4] != MAGIC:
        raise TseqDecodeError(TseqDecodeError.BAD_MAGIC, 0, "expected magic 'TSEQ'")
    if len(data) < HEADER_SIZE:
        raise TseqDecodeError(
            TseqDecodeError.TRUNCATED, len(data),
            f"header needs {HEADER_SIZE} bytes, got {len(data)}",
        )
    _, version, width, height, frame_count, fps, emis = HEADER.unpack_from(data, 0)
    if version != VERSION:
        raise TseqDecodeError(
            TseqDecodeError.UNSUPPORTED_VERSION, 4, f"version {version}, expected {VERSION}"
        )
    if not (1 <= emis <= 10_000):
        raise TseqDecodeError(
            TseqDecodeError.BAD_HEADER, 18, f"emissivity field {emis} outside [1, 10000]"
        )
    if not np.isfinite(fps) or fps <= 0:
        raise TseqDecodeError(
            TseqDecodeError.BAD_HEADER, 14, f"nominal_fps {fps} must be positive and finite"
        )

    cells_per_frame = width * height
    frame_bytes = FRAME_TS.size + 2 * cells_per_frame
    expected = HEADER_SIZE + frame_count * frame_bytes
    if len(data) < expected:
        raise TseqDecodeError(
            TseqDecodeError.TRUNCATED, len(data),
            f"declared {frame_count} frames need {expected} bytes, got {len(data)}",
        )
    if len(data) > expected:
        raise TseqDecodeError(
            TseqDecodeError.TRAILING_DATA, expected,
            f"{len(data) - expected} unexpected bytes after the last frame",
        )

    frames = []
    prev_us = -1
    off = HEADER_SIZE
    for i in range(frame_count):
        (ts_us,) = FRAME_TS.unpack_from(data, off)
        if ts_us <= prev_us:
            raise TseqDecodeError(
                TseqDecodeError.NON_MONOTONE_TIMESTAMPS, off,
                f"frame {i} timestamp {ts_us} us does not increase",
            )
        prev_us = ts_us
        off += FRAME_TS.size
        cells = np.frombuffer(data, dtype="<u2", count=cells_per_frame, offset=off)
        bad = (cells != CELL_INVALID) & ((cells < CELL_MIN) | (cells > CELL_MAX))
        if bad.any():
            j = int(np.flatnonzero(bad)[0])
            raise TseqDecodeError(
                TseqDecodeError.OUT_OF_RANGE_CELL, off + 2 * j,
                f"frame {i} pixel {j}: cell value {int(cells[j])} outside "
                f"[{CELL_MIN}, {CELL_MAX}]",
            )
        pixels = cells.astype(np.float64).reshape(height, width)
        pixels /= 100.0
        pixels[cells.reshape(height, width) == CELL_INVALID] = np.nan
        # cells were range-checked above, so the frame needs no re-sanitizing
        frames.append(_trusted_frame(ts_us / 1e6, pixels))
        off += 2 * cells_per_frame

    meta = SequenceMeta(
        width=width, height=height, nominal_fps=float(fps),
        emissivity=emis / 10_000.0, frame_count=frame_count,
    )
    return ThermalSequence(meta=meta, frames=frames)


def write_tseq(seq: ThermalSequence, path) -> None:
    with open(path, "wb") as f:
        f.write(encode_sequence(seq))


def read_tseq(path) -> ThermalSequence:
    with open(path, "rb") as f:
        return decode_sequence(f.read())
