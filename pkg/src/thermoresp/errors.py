"""Exception types shared across the pipeline."""

from __future__ import annotations


class TseqDecodeError(Exception):
    """Structured parse failure for .tseq byte streams.

    Carries a machine-checkable ``kind``, the byte ``offset`` at which the
    problem was detected, and a human-readable message.
    """

    #: distinct failure kinds
    BAD_MAGIC = "bad_magic"
    UNSUPPORTED_VERSION = "unsupported_version"
    BAD_HEADER = "bad_header"
    TRUNCATED = "truncated"
    TRAILING_DATA = "trailing_data"
    OUT_OF_RANGE_CELL = "out_of_range_cell"
    NON_MONOTONE_TIMESTAMPS = "non_monotone_timestamps"

    def __init__(self, kind: str, offset: int, message: str):
        super().__init__(f"{kind} at byte {offset}: {message}")
        self.kind = kind
        self.offset = offset
        self.detail = message


class RoiBoundsError(ValueError):
    """ROI does not fit inside the frame; ``edge`` names the violated side."""

    def __init__(self, edge: str, message: str):
        super().__init__(message)
        self.edge = edge


class UnusableFrameError(Exception):
    """More than half of the ROI pixels are invalid in this frame."""

    def __init__(self, message: str, frame_index: int | None = None):
        super().__init__(message)
        self.frame_index = frame_index


class EmptySignalError(Exception):
    """Too few samples to form a breathing signal."""


class TooShortError(Exception):
    """Signal shorter than the operation requires."""
