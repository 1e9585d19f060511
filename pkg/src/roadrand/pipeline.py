"""Configuration, manifest/file I/O, and end-to-end orchestration.

All configs are JSON validated against the schemas shipped under
roadrand/schemas; manifests are JSONL for streamability.  Every
generation run records a metadata file with the seed and content hashes
of the config, palette, and calibration, so silent drift is detectable
and any output is reproducible from the recorded metadata alone.
"""

import hashlib
import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from . import __version__, balance, labelmap, metrics, randomizer
from .geometry import CameraRig
from .labelmap import LabelMap, SceneClassConfig
from .markings import Palette, builtin_palette
from .randomizer import RandomizationConfig, SourceEntry


class ConfigError(ValueError):
    """Malformed or schema-invalid input file."""


_SCHEMA_CACHE: dict[str, dict] = {}


def load_schema(name: str) -> dict:
    if name not in _SCHEMA_CACHE:
        text = (
            resources.files("roadrand").joinpath(f"schemas/{name}.schema.json").read_text()
        )
        _SCHEMA_CACHE[name] = json.loads(text)
    return _SCHEMA_CACHE[name]


def validate_json(payload, schema_name: str, source: str = "<memory>") -> None:
    try:
        jsonschema.validate(payload, load_schema(schema_name))
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{source}: invalid {schema_name} at {path}: {exc.message}") from None


def _read_json(path, schema_name: str):
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: not valid JSON: {exc.msg}") from None
    validate_json(payload, schema_name, source=str(path))
    return payload


def write_json(payload, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def content_hash(payload) -> str:
    """SHA-256 over canonical JSON; stable across key order."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# --- config loaders -----------------------------------------------------------


def load_calibration(path) -> CameraRig:
    return CameraRig.from_dict(_read_json(path, "calibration"))


def load_palette(path=None) -> Palette:
    if path is None:
        return builtin_palette()
    return Palette.from_json(_read_json(path, "palette"))


@dataclass(frozen=True)
class GenerationConfig:
    scene: SceneClassConfig
    randomization: RandomizationConfig

    def to_dict(self) -> dict:
        return {
            "scene": self.scene.to_dict(),
            "randomization": self.randomization.to_dict(),
        }


def load_generation_config(path) -> GenerationConfig:
    payload = _read_json(path, "generation_config")
    try:
        return GenerationConfig(
            scene=SceneClassConfig.from_dict(payload["scene"]),
            randomization=RandomizationConfig.from_dict(payload.get("randomization", {})),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# --- manifests ----------------------------------------------------------------


def read_jsonl(path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: file not found")
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                entries.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}:{lineno}: not valid JSON: {exc.msg}") from None
    return entries


def manifest_label_paths(path) -> list[Path]:
    """Label paths from either a source manifest or a generation manifest."""
    base = Path(path).parent
    labels = []
    for lineno, entry in enumerate(read_jsonl(path), 1):
        raw = entry.get("label") or entry.get("output_label")
        if not raw:
            raise ConfigError(f"{path}:{lineno}: no 'label' or 'output_label' field")
        p = Path(raw)
        labels.append(p if p.is_absolute() else base / p)
    if not labels:
        raise ConfigError(f"{path}: manifest is empty")
    return labels


def load_source_entries(path, default_rig: CameraRig) -> list[SourceEntry]:
    """Source manifest entries with per-entry calibration overrides."""
    base = Path(path).parent
    entries = []
    rig_cache: dict[str, CameraRig] = {}
    for lineno, raw in enumerate(read_jsonl(path), 1):
        validate_json(raw, "manifest_entry", source=f"{path}:{lineno}")
        label = Path(raw["label"])
        if not label.is_absolute():
            label = base / label
        rig = default_rig
        calib = raw.get("calib")
        if calib:
            calib_path = str(Path(calib) if Path(calib).is_absolute() else base / calib)
            if calib_path not in rig_cache:
                rig_cache[calib_path] = load_calibration(calib_path)
            rig = rig_cache[calib_path]
        entries.append(SourceEntry(label_path=str(label), rig=rig))
    if not entries:
        raise ConfigError(f"{path}: manifest is empty")
    return entries


def iter_labels(paths) -> list[LabelMap]:
    return [labelmap.read_label_png(p) for p in paths]


# --- orchestration ------------------------------------------------------------


def worker_count(requested: int | None) -> int:
    cap = os.environ.get("ROADRAND_THREADS")
    workers = requested if requested and requested > 0 else 1
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"ROADRAND_THREADS={cap!r} is not an integer") from None
    return workers


def run_generate(
    sources_path,
    calib_path,
    config_path,
    class_counts: list[tuple[str, int]],
    out_dir,
    seed: int | None = None,
    palette_path=None,
    workers: int | None = None,
    write_preview: bool = False,
) -> randomizer.DatasetResult:
    """stats -> weights -> generate pipeline piece: the generate step.

    Writes labels, the JSONL manifest, run metadata, and (on partial
    failure) an errors.jsonl file.
    """
    rig = load_calibration(calib_path)
    config = load_generation_config(config_path)
    palette = load_palette(palette_path)
    rand_cfg = config.randomization
    if seed is not None:
        from dataclasses import replace

        rand_cfg = replace(rand_cfg, master_seed=seed)
    for name, _count in class_counts:
        try:
            palette.get(name)
        except KeyError:
            raise ConfigError(f"class {name!r} not in the palette") from None
    sources = load_source_entries(sources_path, rig)
    n_workers = worker_count(workers)

    result = randomizer.generate_dataset(
        sources,
        rand_cfg,
        config.scene,
        palette,
        class_counts,
        out_dir,
        workers=n_workers,
        write_preview=write_preview,
    )

    # sidecar palette: id -> name -> display colour for the emitted labels
    sidecar = palette.to_json()
    validate_json(sidecar, "palette")
    write_json(sidecar, Path(out_dir) / "palette.json")
    meta = {
        "tool_version": __version__,
        "master_seed": rand_cfg.master_seed,
        "config_hash": content_hash(
            {"scene": config.scene.to_dict(), "randomization": rand_cfg.to_dict()}
        ),
        "palette_hash": content_hash(palette.to_json()),
        "calibration_hash": content_hash(rig.to_dict()),
        "requested": [{"class": n, "count": c} for n, c in class_counts],
        "generated": len(result.records),
        "failed": len(result.errors),
        "workers": n_workers,
    }
    validate_json(meta, "run_meta")
    write_json(meta, Path(out_dir) / "run_meta.json")
    if result.errors:
        with open(Path(out_dir) / "errors.jsonl", "w", encoding="utf-8") as fh:
            for err in result.errors:
                fh.write(json.dumps(err) + "\n")
    return result


def run_stats(manifest_path, out_path, palette_path=None) -> dict:
    palette = load_palette(palette_path)
    labels = iter_labels(manifest_label_paths(manifest_path))
    stats = balance.compute_stats(labels, palette)
    payload = stats.to_dict()
    payload["meta"] = {
        "tool_version": __version__,
        "manifest": str(manifest_path),
        "palette_hash": content_hash(palette.to_json()),
    }
    validate_json(payload, "stats")
    write_json(payload, out_path)
    return payload


def run_weights(
    stats_path, scheme: str, out_path, palette_path=None, include_background: bool = False
) -> dict:
    palette = load_palette(palette_path)
    stats = balance.ClassStats.from_dict(_read_json(stats_path, "stats"))
    try:
        vector = balance.compute_weights(stats, scheme, palette, include_background)
    except balance.DegenerateClassError as exc:
        raise ConfigError(f"{stats_path}: {exc}") from None
    payload = vector.to_dict()
    payload["meta"] = {
        "tool_version": __version__,
        "stats": str(stats_path),
        "include_background": include_background,
    }
    validate_json(payload, "weights")
    write_json(payload, out_path)
    return payload


def run_eval(
    pred_manifest, gt_manifest, class_names: list[str], out_path,
    palette_path=None, ignore_id: int = 255, pooled: bool = False,
) -> dict:
    palette = load_palette(palette_path)
    pred_paths = manifest_label_paths(pred_manifest)
    gt_paths = manifest_label_paths(gt_manifest)
    if len(pred_paths) != len(gt_paths):
        raise ConfigError(
            f"prediction manifest has {len(pred_paths)} entries but ground "
            f"truth has {len(gt_paths)}; pairs are matched by line order"
        )
    try:
        class_ids = [palette.get(name).marking_class.id for name in class_names]
    except KeyError:
        unknown = [n for n in class_names if n not in {e.marking_class.name for e in palette}]
        raise ConfigError(f"classes not in the palette: {unknown}") from None
    names = {palette.get(n).marking_class.id: n for n in class_names}
    pairs = (
        (labelmap.read_label_png(p), labelmap.read_label_png(g))
        for p, g in zip(pred_paths, gt_paths)
    )
    report = metrics.evaluate_set(pairs, class_ids, names, ignore_id=ignore_id, pooled=pooled)
    payload = report.to_dict()
    payload["meta"] = {
        "tool_version": __version__,
        "pred_manifest": str(pred_manifest),
        "gt_manifest": str(gt_manifest),
        "ignore_id": ignore_id,
    }
    validate_json(payload, "report")
    write_json(payload, out_path)
    csv_path = Path(out_path).with_suffix(".csv")
    csv_path.write_text(metrics.report_csv(report), encoding="utf-8")
    return payload


def run_composite(
    original_path, synthesized_path, label_path, out_path, config_path, feather: int = 0
) -> None:
    config = load_generation_config(config_path)
    original = labelmap.read_rgb_png(original_path)
    synthesized = labelmap.read_rgb_png(synthesized_path)
    label = labelmap.read_label_png(label_path)
    out = labelmap.composite_road_surface(
        original, synthesized, label, config.scene, feather_radius=feather
    )
    labelmap.write_rgb_png(out, out_path)


def run_preview(manifest_path, out_dir, config_path=None, palette_path=None) -> list[Path]:
    palette = load_palette(palette_path)
    scene_cfg = None
    if config_path is not None:
        scene_cfg = load_generation_config(config_path).scene
    out_dir = Path(out_dir)
    written = []
    for path in manifest_label_paths(manifest_path):
        label = labelmap.read_label_png(path)
        rgb = labelmap.render_preview(label, palette, scene_cfg)
        out_path = out_dir / (Path(path).stem + "_preview.png")
        labelmap.write_rgb_png(rgb, out_path)
        written.append(out_path)
    return written
