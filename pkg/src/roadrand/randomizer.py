"""Seeded road-layout randomization: marking class, pose, quantity, and
occlusion-aware placement over real scene labels.

Reproducibility: every image owns a Philox (counter-based) stream keyed
by SHA-256(master_seed || image_index), both as 64-bit little-endian
words, truncated to 128 bits.  Output is a pure function of
(sources, rig, config, master_seed), independent of worker count.
"""

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import labelmap as lm
from .geometry import (
    CameraRig,
    GroundPoint,
    NoGroundIntersectionError,
    NotVisibleError,
    PixelPoint,
    image_to_ground,
)
from .markings import Palette, instantiate
from .markings.templates import TEMPLATES

_MAX_SEED = 2**64 - 1


class UnusableSceneError(ValueError):
    """Source label with no road surface to place markings on."""


@dataclass(frozen=True)
class RandomizationConfig:
    """Sampling ranges for scene randomization; all plain configuration."""

    class_weights: dict[str, float] = field(default_factory=dict)
    quantity_min: int = 1
    quantity_max: int = 4
    forward_min: float = 4.0
    forward_max: float = 40.0
    yaw_mode: str = "aligned"  # aligned (to camera axis) | uniform
    yaw_jitter: float = 0.15
    param_jitter: dict[str, dict] = field(default_factory=dict)
    min_placed_fraction: float = 0.25
    retry_budget: int = 20
    master_seed: int = 0

    def __post_init__(self):
        if self.quantity_min < 0 or self.quantity_max < self.quantity_min:
            raise ValueError("quantity range must satisfy 0 <= min <= max")
        if not (0.0 < self.forward_min < self.forward_max):
            raise ValueError("forward range must satisfy 0 < min < max")
        if self.yaw_mode not in ("aligned", "uniform"):
            raise ValueError(f"unknown yaw mode {self.yaw_mode!r}")
        if not (0.0 <= self.yaw_jitter <= math.pi):
            raise ValueError("yaw jitter must lie in [0, pi]")
        if not (0.0 <= self.min_placed_fraction <= 1.0):
            raise ValueError("min placed fraction must lie in [0, 1]")
        if self.retry_budget < 1:
            raise ValueError("retry budget must be at least 1")
        if not (0 <= self.master_seed <= _MAX_SEED):
            raise ValueError("master seed must be an unsigned 64-bit integer")
        for weight in self.class_weights.values():
            if weight < 0:
                raise ValueError("class weights must be non-negative")

    def to_dict(self) -> dict:
        return {
            "class_weights": dict(self.class_weights),
            "quantity": {"min": self.quantity_min, "max": self.quantity_max},
            "forward_range": [self.forward_min, self.forward_max],
            "yaw": {"mode": self.yaw_mode, "jitter": self.yaw_jitter},
            "param_jitter": {k: dict(v) for k, v in self.param_jitter.items()},
            "min_placed_fraction": self.min_placed_fraction,
            "retry_budget": self.retry_budget,
            "master_seed": self.master_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RandomizationConfig":
        quantity = d.get("quantity", {})
        fwd = d.get("forward_range", [4.0, 40.0])
        yaw = d.get("yaw", {})
        return cls(
            class_weights={str(k): float(v) for k, v in d.get("class_weights", {}).items()},
            quantity_min=int(quantity.get("min", 1)),
            quantity_max=int(quantity.get("max", 4)),
            forward_min=float(fwd[0]),
            forward_max=float(fwd[1]),
            yaw_mode=str(yaw.get("mode", "aligned")),
            yaw_jitter=float(yaw.get("jitter", 0.15)),
            param_jitter={
                str(k): dict(v) for k, v in d.get("param_jitter", {}).items()
            },
            min_placed_fraction=float(d.get("min_placed_fraction", 0.25)),
            retry_budget=int(d.get("retry_budget", 20)),
            master_seed=int(d.get("master_seed", 0)),
        )


def derive_image_seed(master_seed: int, image_index: int) -> int:
    """128-bit per-image stream key; distinct for distinct indices."""
    if not (0 <= master_seed <= _MAX_SEED):
        raise ValueError("master seed must be an unsigned 64-bit integer")
    payload = master_seed.to_bytes(8, "little") + int(image_index).to_bytes(8, "little")
    return int.from_bytes(hashlib.sha256(payload).digest()[:16], "little")


def rng_for_image(master_seed: int, image_index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=derive_image_seed(master_seed, image_index))
    )


@dataclass(frozen=True)
class InstanceRecord:
    class_name: str
    class_id: int
    anchor_lateral: float
    anchor_forward: float
    yaw: float
    params: dict
    placed_pixels: int
    footprint_pixels: int
    dropped_polygons: int
    accepted: bool
    reject_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "class": self.class_name,
            "class_id": self.class_id,
            "anchor": [self.anchor_lateral, self.anchor_forward],
            "yaw": self.yaw,
            "params": dict(self.params),
            "placed_pixels": self.placed_pixels,
            "footprint_pixels": self.footprint_pixels,
            "dropped_polygons": self.dropped_polygons,
            "accepted": self.accepted,
            "reject_reason": self.reject_reason,
        }


@dataclass(frozen=True)
class SceneRecord:
    """Provenance of one generated label: every attempt, plus the seed
    that reproduces the scene."""

    image_index: int
    image_seed_hex: str
    source_label: str | None
    output_label: str | None
    instances: tuple[InstanceRecord, ...]
    notes: tuple[str, ...] = ()

    @property
    def accepted_instances(self) -> list[InstanceRecord]:
        return [r for r in self.instances if r.accepted]

    def to_dict(self) -> dict:
        return {
            "image_index": self.image_index,
            "image_seed": self.image_seed_hex,
            "source_label": self.source_label,
            "output_label": self.output_label,
            "instances": [r.to_dict() for r in self.instances],
            "notes": list(self.notes),
        }


def _sample_params(rng: np.random.Generator, template_name: str, jitter: dict) -> dict:
    """Draw jittered template parameters in a fixed (sorted) key order."""
    template = TEMPLATES[template_name]
    specs = {p.name: p for p in template.params}
    params = {}
    for name in sorted(jitter):
        spec = specs.get(name)
        if spec is None:
            raise ValueError(f"jitter for unknown parameter {name!r} of {template_name!r}")
        rule = jitter[name]
        if spec.kind == "float":
            lo, hi = float(rule[0]), float(rule[1])
            params[name] = float(rng.uniform(lo, hi))
        elif spec.kind == "int":
            lo, hi = int(rule[0]), int(rule[1])
            params[name] = int(rng.integers(lo, hi + 1))
        else:  # choice / bool: rule is the list of options
            options = list(rule)
            params[name] = options[int(rng.integers(len(options)))]
    return params


def _sample_yaw(rng: np.random.Generator, cfg: RandomizationConfig) -> float:
    if cfg.yaw_mode == "uniform":
        raw = float(rng.uniform(0.0, 2.0 * math.pi))
        return raw - 2.0 * math.pi if raw > math.pi else raw
    if cfg.yaw_jitter == 0.0:
        return 0.0
    yaw = float(rng.uniform(-cfg.yaw_jitter, cfg.yaw_jitter))
    if yaw <= -math.pi:  # jitter may span the full (-pi, pi] domain
        yaw += 2.0 * math.pi
    return yaw


def _weighted_classes(cfg: RandomizationConfig, palette: Palette):
    if cfg.class_weights:
        names = sorted(cfg.class_weights)
        weights = np.array([cfg.class_weights[n] for n in names], dtype=float)
    else:
        names = [e.marking_class.name for e in palette if e.template is not None]
        weights = np.ones(len(names))
    for name in names:
        palette.get(name)  # raises for unknown classes
    total = weights.sum()
    if total <= 0:
        raise ValueError("class weights sum to zero")
    return names, weights / total


def generate_scene(
    label: lm.LabelMap,
    rig: CameraRig,
    cfg: RandomizationConfig,
    scene_cfg: lm.SceneClassConfig,
    palette: Palette,
    image_seed: int,
    image_index: int = 0,
    source_label: str | None = None,
) -> tuple[lm.LabelMap, SceneRecord]:
    """Erase existing markings, then place a sampled number of randomized
    marking instances on the visible road surface.

    Deterministic given (label, rig, cfg, scene_cfg, palette, image_seed).
    An instance is accepted iff its placed/footprint pixel ratio reaches
    cfg.min_placed_fraction; rejected draws are retried up to
    cfg.retry_budget times per slot and every attempt is recorded.
    """
    erased = lm.erase_markings(label, scene_cfg)
    road_rows, road_cols = np.nonzero(erased.classes == scene_cfg.road_id)
    if len(road_rows) == 0:
        raise UnusableSceneError("label contains no road pixels")

    rng = np.random.Generator(np.random.Philox(key=image_seed))
    class_names, class_probs = _weighted_classes(cfg, palette)
    quantity = int(rng.integers(cfg.quantity_min, cfg.quantity_max + 1))

    current = erased
    records: list[InstanceRecord] = []
    notes: list[str] = []
    for slot in range(quantity):
        placed = False
        for _attempt in range(cfg.retry_budget):
            name = class_names[int(rng.choice(len(class_names), p=class_probs))]
            entry = palette.get(name)
            pick = int(rng.integers(len(road_rows)))
            pixel = PixelPoint(u=road_cols[pick] + 0.5, v=road_rows[pick] + 0.5)
            yaw = _sample_yaw(rng, cfg)
            jitter = cfg.param_jitter.get(name, {})
            params = _sample_params(rng, entry.template, jitter) if jitter else {}

            try:
                anchor = image_to_ground(pixel, rig.intrinsics, rig.pose)
            except NoGroundIntersectionError:
                records.append(
                    InstanceRecord(name, entry.marking_class.id, 0.0, 0.0, yaw, params,
                                   0, 0, 0, False, "anchor back-projection failed")
                )
                continue
            anchor = GroundPoint(
                lateral=anchor.lateral,
                forward=min(max(anchor.forward, cfg.forward_min), cfg.forward_max),
            )

            instance = instantiate(name, params, anchor=anchor, yaw=yaw, palette=palette)
            try:
                result = lm.rasterize_instance(current, instance, rig, scene_cfg)
            except NotVisibleError:
                records.append(
                    InstanceRecord(name, entry.marking_class.id, anchor.lateral,
                                   anchor.forward, yaw, instance.params,
                                   0, 0, 0, False, "projects above horizon")
                )
                continue

            record = InstanceRecord(
                class_name=name,
                class_id=entry.marking_class.id,
                anchor_lateral=anchor.lateral,
                anchor_forward=anchor.forward,
                yaw=yaw,
                params=instance.params,
                placed_pixels=result.placed_pixels,
                footprint_pixels=result.footprint_pixels,
                dropped_polygons=result.dropped_polygons,
                accepted=False,
                reject_reason=None,
            )
            if result.footprint_pixels == 0:
                records.append(replace(record, reject_reason="empty footprint"))
                continue
            fraction = result.placed_pixels / result.footprint_pixels
            if fraction < cfg.min_placed_fraction:
                records.append(
                    replace(record, reject_reason=f"placed fraction {fraction:.3f} too low")
                )
                continue
            current = result.label
            records.append(replace(record, accepted=True))
            placed = True
            break
        if not placed:
            notes.append(f"slot {slot}: retry budget exhausted")

    return current, SceneRecord(
        image_index=image_index,
        image_seed_hex=f"{image_seed:032x}",
        source_label=source_label,
        output_label=None,
        instances=tuple(records),
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class SourceEntry:
    label_path: str
    rig: CameraRig


@dataclass
class DatasetResult:
    records: list[SceneRecord]
    errors: list[dict]

    @property
    def ok(self) -> bool:
        return not self.errors


def _generate_one(
    index: int,
    class_name: str,
    source: SourceEntry,
    cfg: RandomizationConfig,
    scene_cfg: lm.SceneClassConfig,
    palette: Palette,
    out_dir: Path,
    write_preview: bool,
) -> SceneRecord:
    label = lm.read_label_png(source.label_path)
    per_class = replace(cfg, class_weights={class_name: 1.0})
    seed = derive_image_seed(cfg.master_seed, index)
    out_label, record = generate_scene(
        label, source.rig, per_class, scene_cfg, palette, seed,
        image_index=index, source_label=str(source.label_path),
    )
    # stored relative to the output dir so manifests are relocatable and
    # byte-identical across runs into different directories
    rel_path = f"labels/{index:06d}_{class_name}.png"
    lm.write_label_png(out_label, out_dir / rel_path)
    if write_preview:
        preview = lm.render_preview(out_label, palette, scene_cfg)
        lm.write_rgb_png(preview, out_dir / "previews" / f"{index:06d}_{class_name}.png")
    return replace(record, output_label=rel_path)


def generate_dataset(
    sources: Sequence[SourceEntry],
    cfg: RandomizationConfig,
    scene_cfg: lm.SceneClassConfig,
    palette: Palette,
    class_counts: Sequence[tuple[str, int]],
    out_dir,
    workers: int = 1,
    write_preview: bool = False,
) -> DatasetResult:
    """Generate the requested number of labels per target class.

    Source backgrounds are cycled in order, so requests up to the source
    count reuse no background.  Work is embarrassingly parallel per
    image; any worker count yields byte-identical outputs.
    """
    if not sources:
        raise ValueError("generate_dataset requires at least one source")
    for name, count in class_counts:
        palette.get(name)
        if count < 0:
            raise ValueError(f"negative count for class {name!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    tasks = []
    index = 0
    for name, count in class_counts:
        for _ in range(count):
            tasks.append((index, name, sources[index % len(sources)]))
            index += 1

    records: dict[int, SceneRecord] = {}
    errors: list[dict] = []

    def run(task):
        i, name, source = task
        try:
            return i, _generate_one(
                i, name, source, cfg, scene_cfg, palette, out_dir, write_preview
            ), None
        except Exception as exc:  # propagate per-entry failures in the result
            return i, None, {"index": i, "source": source.label_path, "error": str(exc)}

    if workers <= 1:
        outcomes = [run(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, tasks))

    for i, record, error in outcomes:
        if error is not None:
            errors.append(error)
        else:
            records[i] = record

    ordered = [records[i] for i in sorted(records)]
    manifest_path = out_dir / "manifest.jsonl"
    write_manifest(ordered, manifest_path)
    return DatasetResult(records=ordered, errors=errors)


def write_manifest(records: Sequence[SceneRecord], path) -> None:
    import json

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), sort_keys=False) + "\n")
