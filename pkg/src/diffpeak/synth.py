"""Labeled synthetic embeddings with controllable size/sparsity spread."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FeatureMatrix, LabelVector


@dataclass(frozen=True)
class SynthConfig:
    """Generation parameters; identical configs give identical datasets.

    size_law is (min, max, skew): per-cluster sizes are min + floor of
    (max - min + 1) * u**skew with u uniform, so skew > 1 favors small
    clusters (long tail) and skew = 0 pins every cluster at max.
    noise_range is (sigma_min, sigma_max): each cluster draws one isotropic
    per-coordinate noise scale from it. Points are renormalized to the unit
    sphere, so larger sigma means a sparser cluster.
    """

    num_clusters: int
    dim: int
    size_law: tuple[int, int, float]
    noise_range: tuple[float, float]
    seed: int

    def __post_init__(self):
        lo, hi, skew = self.size_law
        s_lo, s_hi = self.noise_range
        if self.num_clusters < 1:
            raise ValueError(f"num_clusters must be >= 1, got {self.num_clusters}")
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if lo < 1 or hi < lo:
            raise ValueError(f"size_law needs 1 <= min <= max, got ({lo}, {hi})")
        if skew < 0:
            raise ValueError(f"size skew must be >= 0, got {skew}")
        if s_lo < 0 or s_hi < s_lo:
            raise ValueError(f"noise_range needs 0 <= min <= max, got ({s_lo}, {s_hi})")


def generate(cfg: SynthConfig) -> tuple[FeatureMatrix, LabelVector]:
    """Draw cluster centers on the unit sphere and noisy points around them."""
    rng = np.random.default_rng(cfg.seed)
    centers = rng.standard_normal((cfg.num_clusters, cfg.dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)

    lo, hi, skew = cfg.size_law
    u = rng.random(cfg.num_clusters) ** skew
    sizes = lo + np.minimum((u * (hi - lo + 1)).astype(np.int64), hi - lo)

    s_lo, s_hi = cfg.noise_range
    sigmas = rng.uniform(s_lo, s_hi, cfg.num_clusters)

    blocks = []
    for c in range(cfg.num_clusters):
        points = centers[c] + sigmas[c] * rng.standard_normal((sizes[c], cfg.dim))
        norms = np.linalg.norm(points, axis=1, keepdims=True)
        if np.any(norms == 0.0):
            raise ArithmeticError(f"degenerate zero-norm sample in cluster {c}")
        blocks.append(points / norms)

    features = FeatureMatrix(np.concatenate(blocks).astype(np.float32))
    labels = LabelVector(np.repeat(np.arange(cfg.num_clusters, dtype=np.int64), sizes))
    return features, labels


def stack(datasets) -> tuple[FeatureMatrix, LabelVector]:
    """Concatenate generated datasets, offsetting labels to stay disjoint."""
    feature_blocks = []
    label_blocks = []
    offset = 0
    for features, labels in datasets:
        feature_blocks.append(features.values)
        label_blocks.append(labels.labels + offset)
        offset += int(labels.labels.max()) + 1
    return (
        FeatureMatrix(np.concatenate(feature_blocks)),
        LabelVector(np.concatenate(label_blocks)),
    )
