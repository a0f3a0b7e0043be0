"""Region proposals and overlap tracking on filtered frames.

Frames are OR-downscaled by (a, b), connected components of the small image
become proposals (tiny specks dropped), proposal boxes are mapped back to
sensor coordinates by multiplying by (a, b), and a greedy IoU tracker links
them over time.  Tracks confirm after a run of consecutive hits and die after
a run of consecutive misses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParamsError
from .frames import BinaryFrame
from .metrics import iou


@dataclass(frozen=True)
class BoundingBox:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise InvalidParamsError(f"box sides must be positive: {self}")

    @property
    def area(self) -> int:
        return self.w * self.h


@dataclass(frozen=True)
class TrackerConfig:
    iou_match_threshold: float = 0.3
    confirm_hits: int = 3       # consecutive hits to confirm (spawn counts as the first)
    kill_misses: int = 5        # consecutive misses to kill

    def __post_init__(self):
        if not 0 < self.iou_match_threshold <= 1:
            raise InvalidParamsError("iou_match_threshold must be in (0, 1]")
        if self.confirm_hits < 1 or self.kill_misses < 1:
            raise InvalidParamsError("confirm_hits and kill_misses must be >= 1")


TENTATIVE = "tentative"
CONFIRMED = "confirmed"
DEAD = "dead"


@dataclass
class Track:
    track_id: int
    boxes: dict[int, BoundingBox] = field(default_factory=dict)
    hits: int = 0
    misses: int = 0
    consecutive_hits: int = 0
    consecutive_misses: int = 0
    state: str = TENTATIVE

    @property
    def last_box(self) -> BoundingBox:
        return self.boxes[max(self.boxes)]


def downscale_or(frame: BinaryFrame, a: int, b: int) -> BinaryFrame:
    """OR-reduce a*b blocks; output is ceil(W/a) x ceil(H/b)."""
    if a < 1 or b < 1:
        raise InvalidParamsError(f"rescale factors must be >= 1, got ({a}, {b})")
    px = frame.pixels
    rows = np.arange(0, frame.height, b)
    cols = np.arange(0, frame.width, a)
    sums = np.add.reduceat(np.add.reduceat(px.astype(np.int32), rows, axis=0), cols, axis=1)
    return BinaryFrame((sums > 0).astype(np.uint8))


def connected_components(frame: BinaryFrame, connectivity: int = 8) -> list[BoundingBox]:
    """Bounding boxes of connected 1-regions (two-pass union-find), sorted by (y, x)."""
    if connectivity not in (4, 8):
        raise InvalidParamsError(f"connectivity must be 4 or 8, got {connectivity}")
    px = frame.pixels
    h, w = px.shape
    labels = np.zeros((h, w), dtype=np.int32)
    parent = [0]

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    next_label = 1
    for r in range(h):
        row = px[r]
        for c in range(w):
            if not row[c]:
                continue
            neigh = []
            if c > 0 and labels[r, c - 1]:
                neigh.append(labels[r, c - 1])
            if r > 0:
                if labels[r - 1, c]:
                    neigh.append(labels[r - 1, c])
                if connectivity == 8:
                    if c > 0 and labels[r - 1, c - 1]:
                        neigh.append(labels[r - 1, c - 1])
                    if c + 1 < w and labels[r - 1, c + 1]:
                        neigh.append(labels[r - 1, c + 1])
            if not neigh:
                labels[r, c] = next_label
                parent.append(next_label)
                next_label += 1
            else:
                m = min(neigh)
                labels[r, c] = m
                for other in neigh:
                    union(m, other)

    extents: dict[int, list[int]] = {}
    for r in range(h):
        for c in range(w):
            lab = labels[r, c]
            if not lab:
                continue
            root = find(lab)
            ext = extents.get(root)
            if ext is None:
                extents[root] = [c, r, c, r]
            else:
                if c < ext[0]:
                    ext[0] = c
                if c > ext[2]:
                    ext[2] = c
                if r < ext[1]:
                    ext[1] = r
                if r > ext[3]:
                    ext[3] = r
    boxes = [
        BoundingBox(x=e[0], y=e[1], w=e[2] - e[0] + 1, h=e[3] - e[1] + 1)
        for e in extents.values()
    ]
    boxes.sort(key=lambda bx: (bx.y, bx.x))
    return boxes


def region_proposals(
    frame: BinaryFrame,
    a: int = 8,
    b: int = 6,
    min_area: int = 2,
    connectivity: int = 8,
) -> list[BoundingBox]:
    """Downscale, label, drop specks below min_area (downscaled px), map back by (a, b)."""
    small = downscale_or(frame, a, b)
    out = []
    for box in connected_components(small, connectivity):
        if box.area < min_area:
            continue
        out.append(BoundingBox(x=box.x * a, y=box.y * b, w=box.w * a, h=box.h * b))
    return out


def track_update(
    tracks: list[Track],
    proposals: list[BoundingBox],
    frame_index: int,
    cfg: TrackerConfig,
) -> list[Track]:
    """One tracker step: greedy IoU matching (ties to the lower track id), then
    hit/miss bookkeeping, confirmations, kills, and spawns."""
    live = [t for t in tracks if t.state != DEAD]
    pairs = []
    for t in live:
        last = t.last_box
        for pi, p in enumerate(proposals):
            v = iou(last, p)
            if v >= cfg.iou_match_threshold:
                pairs.append((-v, t.track_id, pi))
    pairs.sort()
    matched_tracks: set[int] = set()
    matched_props: set[int] = set()
    assignment: dict[int, int] = {}
    for neg_v, tid, pi in pairs:
        if tid in matched_tracks or pi in matched_props:
            continue
        matched_tracks.add(tid)
        matched_props.add(pi)
        assignment[tid] = pi

    for t in live:
        if t.track_id in assignment:
            t.boxes[frame_index] = proposals[assignment[t.track_id]]
            t.hits += 1
            t.consecutive_hits += 1
            t.consecutive_misses = 0
            if t.state == TENTATIVE and t.consecutive_hits >= cfg.confirm_hits:
                t.state = CONFIRMED
        else:
            t.misses += 1
            t.consecutive_misses += 1
            t.consecutive_hits = 0
            if t.consecutive_misses >= cfg.kill_misses:
                t.state = DEAD

    next_id = max((t.track_id for t in tracks), default=-1) + 1
    for pi, p in enumerate(proposals):
        if pi in matched_props:
            continue
        t = Track(track_id=next_id, state=TENTATIVE, hits=1, consecutive_hits=1)
        t.boxes[frame_index] = p
        tracks.append(t)
        next_id += 1
    return tracks


def confirmed_boxes(tracks: list[Track], frame_index: int) -> list[BoundingBox]:
    """Boxes of tracks confirmed as of this frame, by ascending track id."""
    out = []
    for t in tracks:
        if t.state == CONFIRMED and frame_index in t.boxes:
            out.append(t.boxes[frame_index])
    return out


def extract_patch(frame: BinaryFrame, center: tuple[int, int], side: int = 42) -> np.ndarray:
    """Zero-padded side x side crop centered at (x, y)."""
    if side < 1:
        raise InvalidParamsError("patch side must be >= 1")
    cx, cy = center
    x0, y0 = cx - side // 2, cy - side // 2
    out = np.zeros((side, side), dtype=np.uint8)
    sx0, sy0 = max(x0, 0), max(y0, 0)
    sx1, sy1 = min(x0 + side, frame.width), min(y0 + side, frame.height)
    if sx0 < sx1 and sy0 < sy1:
        out[sy0 - y0 : sy1 - y0, sx0 - x0 : sx1 - x0] = frame.pixels[sy0:sy1, sx0:sx1]
    return out


def track_recording(
    frames: list[BinaryFrame],
    cfg: TrackerConfig,
    a: int = 8,
    b: int = 6,
    min_area: int = 2,
    connectivity: int = 8,
) -> tuple[list[Track], dict[int, list[BoundingBox]]]:
    """Run proposals + tracking over a frame sequence; returns the tracks and the
    per-frame confirmed boxes."""
    tracks: list[Track] = []
    per_frame: dict[int, list[BoundingBox]] = {}
    for idx, frame in enumerate(frames):
        proposals = region_proposals(frame, a, b, min_area, connectivity)
        tracks = track_update(tracks, proposals, idx, cfg)
        per_frame[idx] = confirmed_boxes(tracks, idx)
    return tracks, per_frame
