import numpy as np
import pytest

from imfsim.errors import InvalidParamsError
from imfsim.frames import FrameConfig, aggregate_frames
from imfsim.synth import (
    OBJECT_SIZES,
    GroundTruthBox,
    frames_to_events,
    noise_frames,
    read_box_csv,
    traffic_dataset,
    write_box_csv,
)


def test_noise_frames_density_and_determinism():
    a = noise_frames(10, width=240, height=180, p=0.35, seed=3)
    b = noise_frames(10, width=240, height=180, p=0.35, seed=3)
    assert all(x == y for x, y in zip(a, b))
    assert len(a) == 10 and a[0].pixels.shape == (180, 240)
    density = sum(f.popcount() for f in a) / (10 * 43200)
    assert density == pytest.approx(0.35, abs=0.01)
    assert noise_frames(1, p=0.35, seed=4)[0] != a[0]


def test_traffic_dataset_shapes_and_ground_truth():
    frames, gt = traffic_dataset(n_frames=60, seed=0)
    assert len(frames) == 60
    assert frames[0].pixels.shape == (180, 240)
    assert any(g.frame_index == 0 for g in gt)  # an object exists from the start
    ids = {g.track_id for g in gt}
    assert ids == set(range(len(ids)))  # contiguous track ids
    for g in gt:
        assert g.label in OBJECT_SIZES
        assert (g.h, g.w) in OBJECT_SIZES[g.label]
        assert 0 <= g.x and g.x + g.w <= 240
        assert 0 <= g.y and g.y + g.h <= 180
        # objects are solid blocks; salt noise only ever adds pixels
        block = frames[g.frame_index].pixels[g.y : g.y + g.h, g.x : g.x + g.w]
        assert block.all()


def test_traffic_dataset_deterministic_per_seed():
    f1, g1 = traffic_dataset(n_frames=30, seed=9)
    f2, g2 = traffic_dataset(n_frames=30, seed=9)
    assert g1 == g2
    assert all(a == b for a, b in zip(f1, f2))
    f3, g3 = traffic_dataset(n_frames=30, seed=10)
    assert g3 != g1 or any(a != b for a, b in zip(f1, f3))


def test_box_csv_round_trip(tmp_path):
    rows = [
        GroundTruthBox(0, 0, "car", 10, 20, 22, 12),
        GroundTruthBox(1, 0, "car", 13, 20, 22, 12),
        GroundTruthBox(1, 1, "bus", 50, 60, 40, 18),
    ]
    path = tmp_path / "gt.csv"
    write_box_csv(rows, path)
    assert read_box_csv(path) == rows
    text = path.read_text()
    assert text.splitlines()[0] == "frame_index,track_id,class,x,y,w,h"
    assert "\r" not in text


def test_frames_to_events_round_trip():
    frames, _ = traffic_dataset(n_frames=12, seed=2)
    events = frames_to_events(frames, t_f=66_000)
    assert all(ev.polarity == 1 for ev in events)
    assert all(ev.t == (ev.t // 66_000) * 66_000 for ev in events)
    rebuilt = aggregate_frames(
        events, FrameConfig(t_f=66_000, sensor_width=240, sensor_height=180)
    )
    # trailing empty frames cannot round-trip; everything up to the last event does
    assert len(rebuilt) <= len(frames)
    for got, want in zip(rebuilt, frames):
        assert got == want
    assert all(f.popcount() == 0 for f in frames[len(rebuilt) :])


def test_synth_validation():
    assert noise_frames(0) == []
    with pytest.raises(InvalidParamsError):
        noise_frames(3, p=1.5)
    with pytest.raises(InvalidParamsError):
        traffic_dataset(n_frames=0)
