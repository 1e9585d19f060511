"""Training kernels: channel-wise softmax, class-weighted cross-entropy
with analytic gradients, and argmax decoding.

Score maps are (H, W, C) float arrays.  The loss reduction is the mean
over non-ignored pixels (not a weighted mean), which keeps the weight
vector interpretable as per-class multipliers; a weighted-mean reduction
is available behind a flag.
"""

import warnings

import numpy as np

from .balance import WeightVector
from .labelmap import LabelMap


def softmax_channelwise(logits: np.ndarray) -> np.ndarray:
    """Numerically stable per-pixel softmax over the channel axis."""
    x = np.asarray(logits, dtype=np.float64)
    if x.ndim != 3 or x.shape[2] < 2:
        raise ValueError(f"logits must be (H, W, C>=2), got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("logits contain non-finite values")
    shifted = x - x.max(axis=2, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=2, keepdims=True)


def _weights_array(weights, num_classes: int) -> np.ndarray:
    if isinstance(weights, WeightVector):
        return weights.as_array(num_classes)
    arr = np.asarray(weights, dtype=np.float64)
    if arr.shape != (num_classes,):
        raise ValueError(f"weights must have shape ({num_classes},), got {arr.shape}")
    return arr


def weighted_cross_entropy(
    logits: np.ndarray,
    target: LabelMap | np.ndarray,
    weights,
    ignore_id: int | None = None,
    weighted_mean: bool = False,
) -> tuple[float, np.ndarray]:
    """Class-weighted cross-entropy and its exact gradient w.r.t. logits.

    loss = mean over non-ignored pixels p of w[t(p)] * (-log softmax_t(p));
    grad_p = (w[t(p)] / N) * (softmax(logits_p) - onehot(t(p))).

    Ignored pixels contribute zero loss and zero gradient.  With
    weighted_mean=True the reduction divides by the summed weights of
    the non-ignored pixels instead of their count.
    """
    x = np.asarray(logits, dtype=np.float64)
    t = target.classes if isinstance(target, LabelMap) else np.asarray(target)
    if x.shape[:2] != t.shape:
        raise ValueError(f"logits {x.shape} and target {t.shape} disagree")
    num_classes = x.shape[2]
    w = _weights_array(weights, num_classes)

    valid = np.ones(t.shape, dtype=bool) if ignore_id is None else (t != ignore_id)
    if np.any((t >= num_classes) & valid):
        raise ValueError("target contains a class id outside the logit channels")
    n_valid = int(np.count_nonzero(valid))
    if n_valid == 0:
        warnings.warn("all pixels ignored; loss and gradient are zero", RuntimeWarning)
        return 0.0, np.zeros_like(x)

    probs = softmax_channelwise(x)
    t_safe = np.where(valid, t, 0).astype(np.intp)
    rows, cols = np.indices(t.shape)
    log_p = np.log(probs[rows, cols, t_safe])
    pix_w = w[t_safe]
    denom = float(pix_w[valid].sum()) if weighted_mean else float(n_valid)
    if denom == 0.0:
        warnings.warn("summed pixel weights are zero; loss and gradient are zero", RuntimeWarning)
        return 0.0, np.zeros_like(x)
    loss = float(-(pix_w[valid] * log_p[valid]).sum() / denom)

    grad = probs.copy()
    grad[rows, cols, t_safe] -= 1.0
    grad *= (pix_w * valid / denom)[..., None]
    return loss, grad


def argmax_decode(output: np.ndarray) -> LabelMap:
    """Per-pixel class of maximal score; ties break toward the lowest id."""
    x = np.asarray(output)
    if x.ndim != 3:
        raise ValueError(f"output must be (H, W, C), got shape {x.shape}")
    return LabelMap(np.argmax(x, axis=2).astype(np.uint8))
