"""Synthetic workloads: moving-rectangle traffic scenes and dense noise fields.

Traffic scenes contain solid rectangles sized like typical road users seen
from a roadside event camera (three distance bands per class), moving at
constant horizontal velocity, plus Bernoulli salt noise.  Every frame comes
with ground-truth boxes, so the scenes drive the proposal/tracking
evaluation.  Dense noise fields (no objects, high salt rate) are the
characterization workload for error-rate calibration: they are rich in
near-balanced patches, which real traffic frames almost never produce.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import InvalidParamsError
from .frames import BinaryFrame, Event

# (height, width) per class, near/mid/far distance bands
OBJECT_SIZES: dict[str, tuple[tuple[int, int], ...]] = {
    "car": ((16, 42), (25, 47), (34, 82)),
    "bus": ((31, 94), (52, 107), (64, 180)),
    "bike": ((15, 21), (17, 22), (26, 44)),
    "truck": ((22, 50), (35, 61), (50, 104)),
}


@dataclass(frozen=True)
class GroundTruthBox:
    frame_index: int
    track_id: int
    label: str
    x: int
    y: int
    w: int
    h: int


@dataclass
class _Object:
    track_id: int
    label: str
    w: int
    h: int
    x: float
    y: int
    vx: float


def noise_frames(
    count: int, width: int = 240, height: int = 180, p: float = 0.35, seed: int = 0
) -> list[BinaryFrame]:
    """Bernoulli(p) salt fields; the calibration workload."""
    if not 0 <= p <= 1:
        raise InvalidParamsError(f"noise rate must be a probability, got {p}")
    rng = np.random.default_rng(seed)
    return [
        BinaryFrame((rng.random((height, width)) < p).astype(np.uint8))
        for _ in range(count)
    ]


def traffic_dataset(
    n_frames: int = 500,
    width: int = 240,
    height: int = 180,
    salt_p: float = 0.01,
    max_objects: int = 3,
    seed: int = 0,
) -> tuple[list[BinaryFrame], list[GroundTruthBox]]:
    """Moving-rectangle scenes with salt noise and per-frame ground truth.

    Objects stay fully visible: they spawn at a frame edge, cross at constant
    velocity, and despawn before leaving.  The first object spawns at frame 0.
    """
    if n_frames < 1:
        raise InvalidParamsError("need at least one frame")
    rng = np.random.default_rng(seed)
    frames: list[BinaryFrame] = []
    gt: list[GroundTruthBox] = []
    objects: list[_Object] = []
    next_id = 0
    labels = sorted(OBJECT_SIZES)

    def spawn() -> _Object:
        nonlocal next_id
        label = labels[int(rng.integers(len(labels)))]
        h, w = OBJECT_SIZES[label][int(rng.integers(3))]
        w = min(w, width - 2)
        h = min(h, height - 2)
        direction = 1 if rng.random() < 0.5 else -1
        speed = float(rng.integers(1, 4))
        x = 1.0 if direction > 0 else float(width - w - 1)
        y = int(rng.integers(0, height - h))
        obj = _Object(
            track_id=next_id, label=label, w=w, h=h, x=x, y=y, vx=direction * speed
        )
        next_id += 1
        return obj

    for k in range(n_frames):
        if (not objects and k == 0) or (len(objects) < max_objects and rng.random() < 0.08):
            objects.append(spawn())
        canvas = (rng.random((height, width)) < salt_p).astype(np.uint8)
        survivors = []
        for obj in objects:
            xi = int(round(obj.x))
            canvas[obj.y : obj.y + obj.h, xi : xi + obj.w] = 1
            gt.append(
                GroundTruthBox(
                    frame_index=k, track_id=obj.track_id, label=obj.label,
                    x=xi, y=obj.y, w=obj.w, h=obj.h,
                )
            )
            obj.x += obj.vx
            if 0 <= obj.x and obj.x + obj.w <= width:
                survivors.append(obj)
        objects = survivors
        frames.append(BinaryFrame(canvas))
    return frames, gt


def write_box_csv(rows: Sequence[GroundTruthBox], path: Union[str, Path]) -> None:
    """Ground-truth / track box table: frame_index,track_id,class,x,y,w,h."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["frame_index", "track_id", "class", "x", "y", "w", "h"])
        for r in rows:
            writer.writerow([r.frame_index, r.track_id, r.label, r.x, r.y, r.w, r.h])


def read_box_csv(path: Union[str, Path]) -> list[GroundTruthBox]:
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["frame_index", "track_id", "class", "x", "y", "w", "h"]:
            raise InvalidParamsError(f"unexpected box csv header in {path}: {header}")
        out = []
        for row in reader:
            out.append(
                GroundTruthBox(
                    frame_index=int(row[0]), track_id=int(row[1]), label=row[2],
                    x=int(row[3]), y=int(row[4]), w=int(row[5]), h=int(row[6]),
                )
            )
    return out


def frames_to_events(frames: list[BinaryFrame], t_f: int = 66_000) -> list[Event]:
    """One +1 event per on pixel at its frame's epoch.

    Re-accumulating with the same t_f reproduces the frames exactly when the
    first and last frames are nonempty (the accumulator anchors at the first
    event and stops at the last).
    """
    events: list[Event] = []
    for k, frame in enumerate(frames):
        t = k * t_f
        rs, cs = np.nonzero(frame.pixels)
        events.extend(Event(t=t, x=int(c), y=int(r), polarity=1) for r, c in zip(rs, cs))
    return events
