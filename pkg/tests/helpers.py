"""Shared test utilities: random frames, on-disk fixtures, CLI invocation."""

from pathlib import Path

import numpy as np

from imfsim.cli import main
from imfsim.frames import BinaryFrame, write_pbm


def random_frame(rng, width, height, p=0.5) -> BinaryFrame:
    return BinaryFrame((rng.random((height, width)) < p).astype(np.uint8))


def write_frames_dir(frames, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    for i, fr in enumerate(frames):
        write_pbm(fr, directory / f"frame_{i:05d}.pbm")
    return directory


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


def tree_bytes(root: Path) -> dict:
    """Map of relative path -> file bytes for every file under root."""
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }
