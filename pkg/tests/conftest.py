"""Shared fixtures: camera rigs, scene configs, and a miniature dataset."""

import json

import numpy as np
import pytest

from roadrand.geometry import CameraIntrinsics, CameraRig, GroundPlanePose
from roadrand.labelmap import LabelMap, SceneClassConfig, write_label_png

ROAD_ID = 21
CAR_ID = 26
SIDEWALK_ID = 24
IGNORE_ID = 255

MARKING_IDS = frozenset(range(1, 21))


@pytest.fixture
def scene_cfg() -> SceneClassConfig:
    return SceneClassConfig(road_id=ROAD_ID, marking_ids=MARKING_IDS, ignore_id=IGNORE_ID)


@pytest.fixture
def rig() -> CameraRig:
    return CameraRig(
        intrinsics=CameraIntrinsics(500.0, 500.0, 320.0, 128.0, 640, 256),
        pose=GroundPlanePose(camera_height=1.5, pitch=0.05, yaw=0.0),
    )


def make_street_label(
    width: int = 640,
    height: int = 256,
    road_top_frac: float = 0.55,
    rng: np.random.Generator | None = None,
    marking_ids: tuple[int, ...] = (),
) -> LabelMap:
    """Synthetic street scene: sky/buildings above, trapezoidal road below,
    optional car blobs and pre-existing marking patches."""
    raster = np.full((height, width), SIDEWALK_ID, dtype=np.uint8)
    horizon = int(height * road_top_frac)
    raster[:horizon, :] = 30  # building / sky block
    for row in range(horizon, height):
        t = (row - horizon) / max(1, height - horizon)
        half = int(width * (0.08 + 0.42 * t))
        mid = width // 2
        raster[row, max(0, mid - half) : min(width, mid + half)] = ROAD_ID
    if rng is not None:
        for _ in range(int(rng.integers(0, 3))):
            r0 = int(rng.integers(horizon, height - 8))
            c0 = int(rng.integers(0, width - 16))
            raster[r0 : r0 + 8, c0 : c0 + 16] = CAR_ID
        for mid_id in marking_ids:
            r0 = int(rng.integers(horizon, height - 4))
            c0 = int(rng.integers(width // 4, 3 * width // 4))
            raster[r0 : r0 + 4, c0 : c0 + 6] = mid_id
    return LabelMap(raster)


@pytest.fixture
def street_label() -> LabelMap:
    return make_street_label()


def write_mini_dataset(root, n: int = 10, width: int = 160, height: int = 96, seed: int = 7):
    """Bundle a small on-disk dataset: labels + source manifest + calib +
    generation config.  Returns (manifest_path, calib_path, config_path)."""
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    labels_dir = root / "labels"
    entries = []
    for i in range(n):
        label = make_street_label(
            width, height, road_top_frac=0.5, rng=rng, marking_ids=(1, 5) if i % 2 else ()
        )
        path = labels_dir / f"src_{i:03d}.png"
        write_label_png(label, path)
        entries.append({"label": str(path)})
    manifest = root / "sources.jsonl"
    with open(manifest, "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(json.dumps(entry) + "\n")

    calib = root / "calib.json"
    calib.write_text(
        json.dumps(
            {
                "focal_u": 140.0,
                "focal_v": 140.0,
                "center_u": width / 2.0,
                "center_v": height * 0.45,
                "image_width": width,
                "image_height": height,
                "camera_height": 1.5,
                "pitch": 0.04,
                "yaw": 0.0,
            },
            indent=2,
        )
    )

    config = root / "config.json"
    config.write_text(
        json.dumps(
            {
                "scene": {
                    "road_id": ROAD_ID,
                    "marking_ids": sorted(MARKING_IDS),
                    "ignore_id": IGNORE_ID,
                },
                "randomization": {
                    "quantity": {"min": 1, "max": 2},
                    "forward_range": [4.0, 30.0],
                    "yaw": {"mode": "aligned", "jitter": 0.2},
                    "min_placed_fraction": 0.05,
                    "retry_budget": 20,
                    "master_seed": 11,
                },
            },
            indent=2,
        )
    )
    return manifest, calib, config


@pytest.fixture
def mini_dataset(tmp_path):
    return write_mini_dataset(tmp_path / "mini")
