"""Dataset class statistics and the three class-weighting schemes.

Per class c over a dataset of labels:

* pixel frequency  f_c = pixels of c / total pixels of labels containing c
* occurrence rate  n_c = labels containing c / total labels

Weight schemes:

* eq: w_c = 1 for every class.
* fb: w_c = median(F) / f_c over the included classes (median frequency
  balancing); corrects for classes that naturally occupy few pixels.
* tb: w_c = median(G) / (f_c + n_c) with G = {f_c + n_c}; additionally
  corrects for occurrence-rate imbalance across the dataset, which fb
  ignores.

Counting uses exact 64-bit integers; ratios are taken once at the end.
"""

import statistics
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .labelmap import LabelMap
from .markings import Palette

FLAG_ABSENT = "absent"
FLAG_BACKGROUND_EXCLUDED = "background_excluded"

BACKGROUND_ID = 0


class DegenerateClassError(ValueError):
    """A class included in a weighting scheme has a zero denominator."""


@dataclass(frozen=True)
class ClassCount:
    pixel_count: int = 0
    pixels_in_present_labels: int = 0
    image_count: int = 0


@dataclass(frozen=True)
class ClassStats:
    """Exact per-class counts plus derived frequencies."""

    counts: dict[int, ClassCount]
    names: dict[int, str]
    total_images: int

    def present(self, class_id: int) -> bool:
        return self.counts[class_id].image_count > 0

    def f(self, class_id: int) -> float:
        c = self.counts[class_id]
        if c.image_count == 0:
            raise DegenerateClassError(
                f"f undefined for class {class_id} (absent from every label)"
            )
        return c.pixel_count / c.pixels_in_present_labels

    def n(self, class_id: int) -> float:
        return self.counts[class_id].image_count / self.total_images

    def to_dict(self) -> dict:
        classes = []
        for cid in sorted(self.counts):
            c = self.counts[cid]
            item = {
                "id": cid,
                "name": self.names[cid],
                "pixel_count": c.pixel_count,
                "pixels_in_present_labels": c.pixels_in_present_labels,
                "image_count": c.image_count,
                "n": self.n(cid),
            }
            item["f"] = self.f(cid) if c.image_count > 0 else None
            classes.append(item)
        return {"total_images": self.total_images, "classes": classes}

    @classmethod
    def from_dict(cls, d: dict) -> "ClassStats":
        counts, names = {}, {}
        for item in d["classes"]:
            cid = int(item["id"])
            counts[cid] = ClassCount(
                pixel_count=int(item["pixel_count"]),
                pixels_in_present_labels=int(item["pixels_in_present_labels"]),
                image_count=int(item["image_count"]),
            )
            names[cid] = str(item["name"])
        return cls(counts=counts, names=names, total_images=int(d["total_images"]))


def compute_stats(labels: Iterable[LabelMap], palette: Palette) -> ClassStats:
    """Count palette-class pixels and occurrences over a label set.

    Merging per-label integer counts is associative and commutative, so
    sharded counting gives schedule-independent results.
    """
    ids = [e.marking_class.id for e in palette]
    pixel_count = {cid: 0 for cid in ids}
    pixels_present = {cid: 0 for cid in ids}
    image_count = {cid: 0 for cid in ids}
    total_images = 0
    id_set = set(ids)
    for label in labels:
        total_images += 1
        label_pixels = label.classes.size
        values, counts = np.unique(label.classes, return_counts=True)
        for value, count in zip(values.tolist(), counts.tolist()):
            if value in id_set:
                pixel_count[value] += count
                pixels_present[value] += label_pixels
                image_count[value] += 1
    if total_images == 0:
        raise ValueError("compute_stats requires at least one label")
    return ClassStats(
        counts={
            cid: ClassCount(pixel_count[cid], pixels_present[cid], image_count[cid])
            for cid in ids
        },
        names={e.marking_class.id: e.marking_class.name for e in palette},
        total_images=total_images,
    )


@dataclass(frozen=True)
class WeightVector:
    """Per-class loss weights with bookkeeping flags."""

    scheme: str
    weights: dict[int, float]
    names: dict[int, str]
    flags: dict[int, tuple[str, ...]] = field(default_factory=dict)

    def weight(self, class_id: int) -> float:
        return self.weights[class_id]

    def as_array(self, num_classes: int | None = None) -> np.ndarray:
        n = num_classes if num_classes is not None else max(self.weights) + 1
        arr = np.zeros(n, dtype=np.float64)
        for cid, w in self.weights.items():
            if cid < n:
                arr[cid] = w
        return arr

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "classes": [
                {
                    "id": cid,
                    "name": self.names[cid],
                    "weight": self.weights[cid],
                    "flags": list(self.flags.get(cid, ())),
                }
                for cid in sorted(self.weights)
            ],
        }


def weights_eq(palette: Palette) -> WeightVector:
    """Equal weighting: w_c = 1 for every class, stats-independent."""
    return WeightVector(
        scheme="eq",
        weights={e.marking_class.id: 1.0 for e in palette},
        names={e.marking_class.id: e.marking_class.name for e in palette},
    )


def _included_ids(stats: ClassStats, include_background: bool) -> tuple[list[int], dict]:
    """Split classes into median participants and flagged leftovers."""
    included, flags = [], {}
    for cid in sorted(stats.counts):
        if cid == BACKGROUND_ID and not include_background:
            flags[cid] = (FLAG_BACKGROUND_EXCLUDED,)
            continue
        if not stats.present(cid):
            flags[cid] = (FLAG_ABSENT,)
            continue
        included.append(cid)
    if not included:
        raise DegenerateClassError("no present classes to balance")
    return included, flags


def weights_fb(stats: ClassStats, include_background: bool = False) -> WeightVector:
    """Median frequency balancing: w_c = median(F) / f_c.

    Absent classes are excluded from the median and get weight 0 with an
    'absent' flag; the background is excluded by default.
    """
    included, flags = _included_ids(stats, include_background)
    f = {cid: stats.f(cid) for cid in included}
    if any(v == 0.0 for v in f.values()):
        raise DegenerateClassError("zero pixel frequency for an included class")
    med = statistics.median(f.values())
    weights = {cid: 0.0 for cid in stats.counts}
    weights.update({cid: med / f[cid] for cid in included})
    return WeightVector(scheme="fb", weights=weights, names=dict(stats.names), flags=flags)


def weights_tb(stats: ClassStats, include_background: bool = False) -> WeightVector:
    """Median total balancing: w_c = median(G) / (f_c + n_c), G = {f_c + n_c}.

    Balances average pixel area and occurrence-rate imbalance; with all
    n_c = 0 this reduces to fb.
    """
    included, flags = _included_ids(stats, include_background)
    g = {cid: stats.f(cid) + stats.n(cid) for cid in included}
    if any(v == 0.0 for v in g.values()):
        raise DegenerateClassError("zero f + n for an included class")
    med = statistics.median(g.values())
    weights = {cid: 0.0 for cid in stats.counts}
    weights.update({cid: med / g[cid] for cid in included})
    return WeightVector(scheme="tb", weights=weights, names=dict(stats.names), flags=flags)


def compute_weights(
    stats: ClassStats, scheme: str, palette: Palette, include_background: bool = False
) -> WeightVector:
    if scheme == "eq":
        return weights_eq(palette)
    if scheme == "fb":
        return weights_fb(stats, include_background)
    if scheme == "tb":
        return weights_tb(stats, include_background)
    raise ValueError(f"unknown weighting scheme {scheme!r} (expected eq, fb, or tb)")
