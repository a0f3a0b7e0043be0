"""Event streams and binary frames.

Event files are plain text, one event per line:

    t_us,x,y,polarity

with microsecond integer timestamps (non-decreasing), pixel coordinates, and
polarity encoded as 0 (off, parsed to -1) or 1 (on, parsed to +1).  Lines whose
first non-blank character is '#' are comments; blank lines are skipped.
Anything else either parses or raises an error that names the 1-based line.

Frames are binary images stored as (height, width) uint8 arrays of {0,1} and
serialized as binary PBM (P4): rows packed MSB-first, each row padded to a
byte boundary, 1 = event pixel.

Accumulation turns an event stream into a frame sequence: time is cut into
half-open windows of t_f microseconds anchored at the first event's timestamp,
and a pixel is 1 iff at least one event (either polarity) hit it inside the
window.  Windows with no events still produce (empty) frames, so frame index
times t_f is always the offset from the stream start.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence, TextIO, Union

import numpy as np

from .errors import (
    InvalidParamsError,
    MalformedLineError,
    NonMonotonicTimestampError,
    OutOfBoundsError,
)

# The filtering macro is 320 columns by 240 rows; frames must fit in it.
MAX_FRAME_WIDTH = 320
MAX_FRAME_HEIGHT = 240


@dataclass(frozen=True)
class Event:
    t: int          # microseconds
    x: int
    y: int
    polarity: int   # -1 or +1

    def __post_init__(self):
        if self.t < 0 or self.x < 0 or self.y < 0:
            raise InvalidParamsError(f"negative event field: {self}")
        if self.polarity not in (-1, 1):
            raise InvalidParamsError(f"polarity must be -1 or +1, got {self.polarity}")


@dataclass(frozen=True)
class FrameConfig:
    """Accumulation parameters: window length (us) and sensor dimensions."""

    t_f: int = 66_000           # 66 ms windows, ~15 frames per second
    sensor_width: int = 240
    sensor_height: int = 180

    def __post_init__(self):
        if self.t_f <= 0:
            raise InvalidParamsError(f"t_f must be positive, got {self.t_f}")
        if not (0 < self.sensor_width <= MAX_FRAME_WIDTH):
            raise InvalidParamsError(
                f"sensor_width must be in 1..{MAX_FRAME_WIDTH}, got {self.sensor_width}"
            )
        if not (0 < self.sensor_height <= MAX_FRAME_HEIGHT):
            raise InvalidParamsError(
                f"sensor_height must be in 1..{MAX_FRAME_HEIGHT}, got {self.sensor_height}"
            )


class BinaryFrame:
    """A (height, width) binary image backed by a uint8 array of {0,1}."""

    __slots__ = ("pixels",)

    def __init__(self, pixels: np.ndarray):
        arr = np.asarray(pixels)
        if arr.ndim != 2 or arr.size == 0:
            raise InvalidParamsError(f"frame must be a nonempty 2-d array, got shape {arr.shape}")
        if arr.dtype == np.bool_:
            arr = arr.astype(np.uint8)
        if arr.dtype != np.uint8:
            if not np.isin(arr, (0, 1)).all():
                raise InvalidParamsError("frame pixels must be 0 or 1")
            arr = arr.astype(np.uint8)
        elif arr.max(initial=0) > 1:
            raise InvalidParamsError("frame pixels must be 0 or 1")
        if arr.shape[1] > MAX_FRAME_WIDTH or arr.shape[0] > MAX_FRAME_HEIGHT:
            raise InvalidParamsError(
                f"frame {arr.shape[1]}x{arr.shape[0]} exceeds {MAX_FRAME_WIDTH}x{MAX_FRAME_HEIGHT}"
            )
        self.pixels = arr

    @classmethod
    def zeros(cls, width: int, height: int) -> "BinaryFrame":
        return cls(np.zeros((height, width), dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def popcount(self) -> int:
        return int(self.pixels.sum())

    def copy(self) -> "BinaryFrame":
        return BinaryFrame(self.pixels.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryFrame):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self):  # pragma: no cover - frames are not meant to be dict keys
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryFrame({self.width}x{self.height}, ones={self.popcount()})"


def is_empty(frame: BinaryFrame) -> bool:
    """True iff the frame contains no event pixel."""
    return not frame.pixels.any()


# ---------------------------------------------------------------------------
# event stream parsing / writing
# ---------------------------------------------------------------------------

def _iter_lines(source: Union[str, Path, TextIO, Iterable[str]]) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="ascii") as fh:
            yield from fh
    else:
        yield from source


def parse_event_stream(source: Union[str, Path, TextIO, Iterable[str]]) -> list[Event]:
    """Parse an event text stream; every line yields an Event or a located error."""
    events: list[Event] = []
    last_t = None
    for line_no, raw in enumerate(_iter_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(",")
        if len(fields) != 4:
            raise MalformedLineError(line_no, f"expected 4 fields, got {len(fields)}")
        try:
            t, x, y, pol = (int(f) for f in fields)
        except ValueError:
            raise MalformedLineError(line_no, "non-integer field") from None
        if t < 0 or x < 0 or y < 0:
            raise MalformedLineError(line_no, "negative field")
        if pol not in (0, 1):
            raise MalformedLineError(line_no, f"polarity must be 0 or 1, got {pol}")
        if last_t is not None and t < last_t:
            raise NonMonotonicTimestampError(line_no)
        last_t = t
        events.append(Event(t=t, x=x, y=y, polarity=1 if pol else -1))
    return events


def write_event_stream(events: Sequence[Event], path: Union[str, Path]) -> None:
    """Write events in the same text format parse_event_stream reads."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for ev in events:
            fh.write(f"{ev.t},{ev.x},{ev.y},{1 if ev.polarity > 0 else 0}\n")


# ---------------------------------------------------------------------------
# accumulation
# ---------------------------------------------------------------------------

def aggregate_frames(events: Sequence[Event], cfg: FrameConfig) -> list[BinaryFrame]:
    """OR-accumulate events into t_f windows anchored at the first event.

    Both polarities mark the pixel.  An event exactly on a window boundary
    belongs to the later window.  Raises OutOfBoundsError if an event lies
    outside the configured sensor.
    """
    if not events:
        return []
    for ev in events:
        if ev.x >= cfg.sensor_width or ev.y >= cfg.sensor_height:
            raise OutOfBoundsError(
                f"event {ev} outside {cfg.sensor_width}x{cfg.sensor_height} sensor"
            )
    t0 = events[0].t
    n_frames = (events[-1].t - t0) // cfg.t_f + 1
    stack = np.zeros((n_frames, cfg.sensor_height, cfg.sensor_width), dtype=np.uint8)
    ts = np.fromiter((ev.t for ev in events), dtype=np.int64, count=len(events))
    xs = np.fromiter((ev.x for ev in events), dtype=np.intp, count=len(events))
    ys = np.fromiter((ev.y for ev in events), dtype=np.intp, count=len(events))
    ks = (ts - t0) // cfg.t_f
    stack[ks, ys, xs] = 1
    return [BinaryFrame(stack[k]) for k in range(n_frames)]


# ---------------------------------------------------------------------------
# PBM (P4) i/o
# ---------------------------------------------------------------------------

def write_pbm(frame: BinaryFrame, path: Union[str, Path]) -> None:
    header = f"P4\n{frame.width} {frame.height}\n".encode("ascii")
    packed = np.packbits(frame.pixels, axis=1)  # MSB-first, rows byte-padded
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(packed.tobytes())


def read_pbm(path: Union[str, Path]) -> BinaryFrame:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    i = 0
    # header: magic, width, height; '#' starts a comment through end of line
    while len(tokens) < 3 and i < len(data):
        c = data[i : i + 1]
        if c.isspace():
            i += 1
        elif c == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace():
                j += 1
            tokens.append(data[i:j])
            i = j
    if len(tokens) != 3 or tokens[0] != b"P4":
        raise InvalidParamsError(f"not a binary PBM file: {path}")
    width, height = int(tokens[1]), int(tokens[2])
    i += 1  # single whitespace byte after the header
    row_bytes = (width + 7) // 8
    raw = np.frombuffer(data, dtype=np.uint8, count=height * row_bytes, offset=i)
    bits = np.unpackbits(raw.reshape(height, row_bytes), axis=1)[:, :width]
    return BinaryFrame(bits)
