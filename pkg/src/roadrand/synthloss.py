"""Loss combinators of the image-synthesis objective.

These operate on caller-supplied discriminator score maps and feature
pyramids; training or running the networks themselves is out of scope.

A feature pyramid is a sequence of scales, each a sequence of per-layer
real tensors.  The layer schedule divides layer i of l by
w_i = 2^(l - i), so early layers are progressively down-weighted.
"""

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_SCALES = 3


@dataclass(frozen=True)
class LossWeights:
    """Blending coefficients and layer counts of the total objective."""

    lambda_fm: float = 10.0
    lambda_vgg: float = 10.0
    layers_fm: int = 4
    layers_perceptual: int = 5

    def __post_init__(self):
        if self.lambda_fm < 0 or self.lambda_vgg < 0:
            raise ValueError("lambdas must be non-negative")
        if self.layers_fm < 1 or self.layers_perceptual < 1:
            raise ValueError("layer counts must be at least 1")


def layer_weight(i: int, l: int) -> float:
    """Down-weighting factor 2^(l - i) for layer i of l (1-based)."""
    if not 1 <= i <= l:
        raise ValueError(f"layer index {i} outside 1..{l}")
    return 2.0 ** (l - i)


def _l1(real: np.ndarray, fake: np.ndarray, elementwise_mean: bool) -> float:
    a = np.asarray(real, dtype=np.float64)
    b = np.asarray(fake, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"feature shapes differ: {a.shape} vs {b.shape}")
    diff = np.abs(a - b)
    return float(diff.mean()) if elementwise_mean else float(diff.sum())


def _pyramid_l1(real_pyramid, fake_pyramid, layers: int, elementwise_mean: bool) -> float:
    if len(real_pyramid) != len(fake_pyramid):
        raise ValueError("pyramids have different scale counts")
    total = 0.0
    for real_scale, fake_scale in zip(real_pyramid, fake_pyramid):
        if len(real_scale) < layers or len(fake_scale) < layers:
            raise ValueError(f"pyramid has fewer than {layers} layers at some scale")
        for i in range(1, layers + 1):
            total += _l1(real_scale[i - 1], fake_scale[i - 1], elementwise_mean) / layer_weight(
                i, layers
            )
    return total


def feature_matching_loss(
    real_features, fake_features, layers: int, elementwise_mean: bool = False
) -> float:
    """L1 distance between discriminator features of real and synthesized
    inputs, summed over scales with the 1/2^(l-i) layer schedule."""
    return _pyramid_l1(real_features, fake_features, layers, elementwise_mean)


def perceptual_loss(
    real_features, fake_features, layers: int, elementwise_mean: bool = False
) -> float:
    """Same structure as the feature-matching loss, over the single-scale
    features of a fixed perception network."""
    return _pyramid_l1([real_features], [fake_features], layers, elementwise_mean)


def _pyramid_l1_gradient(real_pyramid, fake_pyramid, layers, elementwise_mean):
    if len(real_pyramid) != len(fake_pyramid):
        raise ValueError("pyramids have different scale counts")
    grads = []
    for real_scale, fake_scale in zip(real_pyramid, fake_pyramid):
        if len(real_scale) < layers or len(fake_scale) < layers:
            raise ValueError(f"pyramid has fewer than {layers} layers at some scale")
        scale_grads = []
        for i in range(1, layers + 1):
            a = np.asarray(real_scale[i - 1], dtype=np.float64)
            b = np.asarray(fake_scale[i - 1], dtype=np.float64)
            if a.shape != b.shape:
                raise ValueError(f"feature shapes differ: {a.shape} vs {b.shape}")
            g = np.sign(b - a) / layer_weight(i, layers)
            if elementwise_mean:
                g = g / a.size
            scale_grads.append(g)
        grads.append(scale_grads)
    return grads


def feature_matching_gradient(
    real_features, fake_features, layers: int, elementwise_mean: bool = False
):
    """d(feature_matching_loss)/d(fake), one array per (scale, layer).

    Subgradient 0 where real and fake coincide elementwise.  Gradients
    with respect to network parameters are the caller's business.
    """
    return _pyramid_l1_gradient(real_features, fake_features, layers, elementwise_mean)


def perceptual_gradient(
    real_features, fake_features, layers: int, elementwise_mean: bool = False
):
    """d(perceptual_loss)/d(fake), one array per layer."""
    return _pyramid_l1_gradient(
        [real_features], [fake_features], layers, elementwise_mean
    )[0]


def gan_generator_gradient(fake_scores):
    """d(generator term)/d(fake score), per scale: -1 / (N * score)."""
    grads = []
    for fake in fake_scores:
        f = np.asarray(fake, dtype=np.float64)
        if f.size == 0:
            raise ValueError("fake score map is empty")
        if np.any(f <= 0.0) or np.any(f >= 1.0):
            raise ValueError("fake scores must lie strictly inside (0, 1)")
        grads.append(-1.0 / (f.size * f))
    return grads


@dataclass(frozen=True)
class GanLossResult:
    discriminator_per_scale: tuple[float, ...]
    generator_per_scale: tuple[float, ...]

    @property
    def discriminator_total(self) -> float:
        return math.fsum(self.discriminator_per_scale)

    @property
    def generator_total(self) -> float:
        return math.fsum(self.generator_per_scale)


def gan_loss(real_scores, fake_scores) -> GanLossResult:
    """Per-scale adversarial terms over probability score maps in (0, 1).

    Discriminator: -mean(log real) - mean(log(1 - fake)).
    Generator: -mean(log fake).
    Scores outside the open interval raise; nothing is clamped silently.
    """
    if len(real_scores) != len(fake_scores):
        raise ValueError("real and fake score maps have different scale counts")
    d_terms, g_terms = [], []
    for real, fake in zip(real_scores, fake_scores):
        r = np.asarray(real, dtype=np.float64)
        f = np.asarray(fake, dtype=np.float64)
        for name, s in (("real", r), ("fake", f)):
            if s.size == 0:
                raise ValueError(f"{name} score map is empty")
            if np.any(s <= 0.0) or np.any(s >= 1.0):
                raise ValueError(f"{name} scores must lie strictly inside (0, 1)")
        d_terms.append(float(-np.mean(np.log(r)) - np.mean(np.log(1.0 - f))))
        g_terms.append(float(-np.mean(np.log(f))))
    return GanLossResult(tuple(d_terms), tuple(g_terms))


def total_objective(
    gan_generator_terms, fm: float, vgg: float, weights: LossWeights
) -> float:
    """Generator-side objective: sum of per-scale adversarial terms plus
    the weighted feature-matching and perceptual losses."""
    values = [float(v) for v in gan_generator_terms] + [float(fm), float(vgg)]
    if not all(math.isfinite(v) for v in values):
        raise ValueError("objective inputs must be finite")
    return math.fsum(gan_generator_terms) + weights.lambda_fm * fm + weights.lambda_vgg * vgg
