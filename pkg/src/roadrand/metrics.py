"""Pixel-wise segmentation metrics at the argmax operating point.

Per class: PRE = TP/(TP+FP), REC = TP/(TP+FN), F1 = 2*PRE*REC/(PRE+REC),
IoU = TP/(TP+FP+FN).  Metrics are computed per image and arithmetically
averaged over the images where the class is defined; mIoU is the mean of
the per-class mean IoU over a declared class subset.

An image where a class appears in neither ground truth nor prediction
is skipped for that class (the class is undefined there); tp = 0 with
fp + fn > 0 scores 0.  A dataset-pooled mode exists for comparison but
per-image averaging is the default.
"""

from dataclasses import dataclass, field

import numpy as np

from .labelmap import LabelMap


@dataclass(frozen=True)
class PixelCounts:
    tp: int
    fp: int
    fn: int

    @property
    def defined(self) -> bool:
        return (self.tp + self.fp + self.fn) > 0


def _raster(label) -> np.ndarray:
    return label.classes if isinstance(label, LabelMap) else np.asarray(label)


def count_pixels(pred, gt, class_id: int, ignore_id: int | None = None) -> PixelCounts:
    """TP/FP/FN pixel counts for one class on one image pair.

    Pixels whose ground truth is ignore_id are excluded from all counts.
    """
    p, g = _raster(pred), _raster(gt)
    if p.shape != g.shape:
        raise ValueError(f"prediction {p.shape} and ground truth {g.shape} disagree")
    considered = np.ones(g.shape, dtype=bool) if ignore_id is None else (g != ignore_id)
    pred_c = (p == class_id) & considered
    gt_c = (g == class_id) & considered
    tp = int(np.count_nonzero(pred_c & gt_c))
    fp = int(np.count_nonzero(pred_c & ~gt_c))
    fn = int(np.count_nonzero(~pred_c & gt_c))
    return PixelCounts(tp=tp, fp=fp, fn=fn)


def image_metrics(counts: PixelCounts) -> tuple[float, float, float, float] | None:
    """(PRE, REC, F1, IoU) for one image, or None when undefined."""
    if not counts.defined:
        return None
    tp, fp, fn = counts.tp, counts.fp, counts.fn
    pre = tp / (tp + fp) if (tp + fp) > 0 else 0.0
    rec = tp / (tp + fn) if (tp + fn) > 0 else 0.0
    f1 = 2.0 * pre * rec / (pre + rec) if (pre + rec) > 0 else 0.0
    iou = tp / (tp + fp + fn)
    return pre, rec, f1, iou


@dataclass(frozen=True)
class ClassReport:
    class_id: int
    name: str
    images_evaluated: int
    precision: float | None
    recall: float | None
    f1: float | None
    iou: float | None

    @property
    def evaluable(self) -> bool:
        return self.images_evaluated > 0


@dataclass(frozen=True)
class MetricsReport:
    classes: dict[int, ClassReport]
    mean_iou: float | None
    mean_precision: float | None
    mean_recall: float | None
    mean_f1: float | None
    subset: tuple[int, ...]
    pooled: bool = False
    # convention marker: images where a class is absent from both pred
    # and gt are skipped for that class rather than scored
    skip_undefined_images: bool = True

    def to_dict(self) -> dict:
        return {
            "per_image_averaging": not self.pooled,
            "skip_undefined_images": self.skip_undefined_images,
            "classes": [
                {
                    "id": r.class_id,
                    "name": r.name,
                    "images_evaluated": r.images_evaluated,
                    "precision": r.precision,
                    "recall": r.recall,
                    "f1": r.f1,
                    "iou": r.iou,
                }
                for r in (self.classes[c] for c in sorted(self.classes))
            ],
            "mean": {
                "classes": [self.classes[c].name for c in self.subset],
                "precision": self.mean_precision,
                "recall": self.mean_recall,
                "f1": self.mean_f1,
                "miou": self.mean_iou,
            },
        }


@dataclass
class _Accumulator:
    sums: list[float] = field(default_factory=lambda: [0.0, 0.0, 0.0, 0.0])
    images: int = 0
    pooled_tp: int = 0
    pooled_fp: int = 0
    pooled_fn: int = 0


def evaluate_set(
    pairs,
    classes,
    names: dict[int, str] | None = None,
    ignore_id: int | None = None,
    pooled: bool = False,
) -> MetricsReport:
    """Evaluate (pred, gt) pairs for the given class ids.

    Per-image metrics are averaged per class over the images where the
    class is defined; pooled=True instead aggregates TP/FP/FN over the
    whole set before applying the formulas.
    """
    class_ids = list(classes)
    if not class_ids:
        raise ValueError("evaluate_set requires at least one class")
    acc = {cid: _Accumulator() for cid in class_ids}
    n_pairs = 0
    for pred, gt in pairs:
        n_pairs += 1
        for cid in class_ids:
            counts = count_pixels(pred, gt, cid, ignore_id)
            a = acc[cid]
            a.pooled_tp += counts.tp
            a.pooled_fp += counts.fp
            a.pooled_fn += counts.fn
            m = image_metrics(counts)
            if m is None:
                continue
            a.images += 1
            for k in range(4):
                a.sums[k] += m[k]
    if n_pairs == 0:
        raise ValueError("evaluate_set requires at least one (pred, gt) pair")

    names = names or {}
    reports: dict[int, ClassReport] = {}
    for cid in class_ids:
        a = acc[cid]
        if pooled:
            m = image_metrics(PixelCounts(a.pooled_tp, a.pooled_fp, a.pooled_fn))
            evaluated = n_pairs if m is not None else 0
            values = m if m is not None else (None, None, None, None)
        elif a.images > 0:
            evaluated = a.images
            values = tuple(s / a.images for s in a.sums)
        else:
            evaluated, values = 0, (None, None, None, None)
        reports[cid] = ClassReport(
            class_id=cid,
            name=names.get(cid, str(cid)),
            images_evaluated=evaluated,
            precision=values[0],
            recall=values[1],
            f1=values[2],
            iou=values[3],
        )

    evaluable = [cid for cid in class_ids if reports[cid].evaluable]
    def mean_of(attr):
        if not evaluable:
            return None
        return sum(getattr(reports[cid], attr) for cid in evaluable) / len(evaluable)

    return MetricsReport(
        classes=reports,
        mean_iou=mean_of("iou"),
        mean_precision=mean_of("precision"),
        mean_recall=mean_of("recall"),
        mean_f1=mean_of("f1"),
        subset=tuple(evaluable),
        pooled=pooled,
    )


def report_csv(report: MetricsReport) -> str:
    """Wide one-row CSV: PRE/REC/F1/IoU per class plus the MEAN block."""
    header, row = [], []
    for cid in sorted(report.classes):
        r = report.classes[cid]
        for metric, value in (
            ("PRE", r.precision),
            ("REC", r.recall),
            ("F1", r.f1),
            ("IoU", r.iou),
        ):
            header.append(f"{r.name}_{metric}")
            row.append("" if value is None else f"{value:.6f}")
    for metric, value in (
        ("MEAN_PRE", report.mean_precision),
        ("MEAN_REC", report.mean_recall),
        ("MEAN_F1", report.mean_f1),
        ("mIoU", report.mean_iou),
    ):
        header.append(metric)
        row.append("" if value is None else f"{value:.6f}")
    return ",".join(header) + "\n" + ",".join(row) + "\n"
