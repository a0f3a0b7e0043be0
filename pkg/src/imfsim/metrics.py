"""Detection/tracking quality metrics and image-level bit error rate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .errors import DimensionMismatchError, InvalidParamsError
from .frames import BinaryFrame

if TYPE_CHECKING:  # pragma: no cover
    from .pipeline import BoundingBox


@dataclass(frozen=True)
class EvalResult:
    recording_id: str
    thr: float
    precision: float
    recall: float
    f1: float
    n_tracks: int


def iou(a: "BoundingBox", b: "BoundingBox") -> float:
    """Intersection over union of two axis-aligned boxes; 0 for empty union."""
    ix = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    iy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.w * a.h + b.w * b.h - inter
    return inter / union if union > 0 else 0.0


def greedy_matches(
    proposed: Sequence["BoundingBox"], gt: Sequence["BoundingBox"], thr: float
) -> list[tuple[int, int, float]]:
    """One-to-one matching by descending IoU, lowest indices breaking ties.

    Only pairs with IoU >= thr participate.  Greedy selection is not always
    maximum-cardinality; callers that care compare against an exact matcher.
    """
    pairs = []
    for i, p in enumerate(proposed):
        for j, g in enumerate(gt):
            v = iou(p, g)
            if v >= thr:
                pairs.append((-v, i, j))
    pairs.sort()
    used_p: set[int] = set()
    used_g: set[int] = set()
    out = []
    for neg_v, i, j in pairs:
        if i in used_p or j in used_g:
            continue
        used_p.add(i)
        used_g.add(j)
        out.append((i, j, -neg_v))
    return out


def precision_recall_f1(
    proposed: Sequence["BoundingBox"], gt: Sequence["BoundingBox"], thr: float
) -> tuple[float, float, float]:
    """Region-level precision/recall/F1 at an IoU threshold; empty denominators give 0."""
    tp = len(greedy_matches(proposed, gt, thr))
    precision = tp / len(proposed) if proposed else 0.0
    recall = tp / len(gt) if gt else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def weighted_f1(results: Sequence[EvalResult]) -> float:
    """F1 averaged over recordings, weighted by each recording's track count."""
    total = sum(r.n_tracks for r in results)
    if total == 0:
        return 0.0
    return sum(r.n_tracks * r.f1 for r in results) / total


def f1_curve_auc(thresholds: Sequence[float], values: Sequence[float]) -> float:
    """Trapezoidal area under a metric-vs-threshold curve."""
    if len(thresholds) != len(values):
        raise InvalidParamsError("thresholds and values must have equal length")
    if len(thresholds) < 2:
        raise InvalidParamsError("need at least two thresholds")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise InvalidParamsError("thresholds must be strictly increasing")
    area = 0.0
    for (t0, t1), (v0, v1) in zip(
        zip(thresholds, thresholds[1:]), zip(values, values[1:])
    ):
        area += (t1 - t0) * (v0 + v1) / 2.0
    return area


def image_ber(hardware: Sequence[BinaryFrame], reference: Sequence[BinaryFrame]) -> float:
    """Mean absolute pixel difference between two frame sequences."""
    if len(hardware) != len(reference) or not hardware:
        raise DimensionMismatchError("frame sequences must be nonempty and equal length")
    diff = 0
    pixels = 0
    for h, r in zip(hardware, reference):
        if h.pixels.shape != r.pixels.shape:
            raise DimensionMismatchError(
                f"frame shape mismatch: {h.pixels.shape} vs {r.pixels.shape}"
            )
        diff += int((h.pixels != r.pixels).sum())
        pixels += h.pixels.size
    return diff / pixels
