"""Binary median filters.

On a binary image the n x n median equals a majority vote: the output is 1
iff at least ceil(n^2/2) pixels of the window are 1.  Two stride policies:

* overlap: classic sliding window, stride 1, zero padding, output per pixel.
* non-overlap: the image is tiled into disjoint n x n patches from (0,0) and
  one majority decision is written to every pixel of the patch.  Edge tiles
  with m < n^2 present pixels use threshold ceil(m/2).

Both are pure functions of the input frame.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidCountError, InvalidParamsError
from .frames import BinaryFrame


@dataclass(frozen=True)
class KernelSpec:
    n: int = 3

    def __post_init__(self):
        if self.n < 3 or self.n % 2 == 0:
            raise InvalidParamsError(f"kernel size must be odd and >= 3, got {self.n}")

    @property
    def threshold(self) -> int:
        # ceil(n^2 / 2)
        return (self.n * self.n + 1) // 2


class StrideMode(enum.Enum):
    OVERLAP = "overlap"
    NON_OVERLAP = "non_overlap"


def patch_majority(count: int, spec: KernelSpec) -> int:
    """Majority bit for a full n x n patch holding `count` ones."""
    if not 0 <= count <= spec.n * spec.n:
        raise InvalidCountError(f"count {count} impossible for n={spec.n}")
    return 1 if count >= spec.threshold else 0


def median_filter_overlap(frame: BinaryFrame, spec: KernelSpec) -> BinaryFrame:
    """Stride-1 binary median with zero padding; output has the input's shape."""
    n, r = spec.n, spec.n // 2
    padded = np.pad(frame.pixels, r).astype(np.int32)
    # integral image: window sums without touching each pixel n^2 times
    s = padded.cumsum(axis=0).cumsum(axis=1)
    s = np.pad(s, ((1, 0), (1, 0)))
    h, w = frame.height, frame.width
    counts = s[n : n + h, n : n + w] - s[:h, n : n + w] - s[n : n + h, :w] + s[:h, :w]
    return BinaryFrame((counts >= spec.threshold).astype(np.uint8))


def _tile_edges(size: int, n: int) -> np.ndarray:
    return np.arange(0, size, n)


def nomf(frame: BinaryFrame, spec: KernelSpec) -> BinaryFrame:
    """Non-overlapping median: one majority decision per disjoint n x n tile."""
    n = spec.n
    px = frame.pixels
    rows = _tile_edges(frame.height, n)
    cols = _tile_edges(frame.width, n)
    sums = np.add.reduceat(np.add.reduceat(px.astype(np.int32), rows, axis=0), cols, axis=1)
    row_sizes = np.diff(np.append(rows, frame.height))
    col_sizes = np.diff(np.append(cols, frame.width))
    cells = np.outer(row_sizes, col_sizes)
    bits = (sums >= (cells + 1) // 2).astype(np.uint8)
    out = np.repeat(np.repeat(bits, row_sizes, axis=0), col_sizes, axis=1)
    return BinaryFrame(out)


def apply_filter(frame: BinaryFrame, spec: KernelSpec, mode: StrideMode) -> BinaryFrame:
    if mode is StrideMode.OVERLAP:
        return median_filter_overlap(frame, spec)
    return nomf(frame, spec)
