"""Shared data types used across the pipeline.

All containers are plain dataclasses over numpy arrays. They are immutable
after construction and safe to share across threads for reading. Numerical
invariants (row-stochasticity, unit norms, ...) are enforced by the
operations that produce or consume the data, not by the constructors, which
only check structural consistency.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class FormatError(ValueError):
    """A file does not conform to one of the on-disk formats."""


@dataclass(frozen=True)
class FeatureMatrix:
    """Dense n-by-d matrix of embeddings, one row per point, float32."""

    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float32)
        if v.ndim != 2:
            raise ValueError(f"feature matrix must be 2-D, got shape {v.shape}")
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"feature matrix must be at least 1x1, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("feature matrix contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class LabelVector:
    """Ground-truth identity per point; values are arbitrary non-negative ints."""

    labels: np.ndarray

    def __post_init__(self):
        lab = np.ascontiguousarray(self.labels, dtype=np.int64)
        if lab.ndim != 1 or lab.size < 1:
            raise ValueError("labels must be a non-empty 1-D integer array")
        if lab.min() < 0:
            raise ValueError("labels must be non-negative")
        object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.labels.size

    def __len__(self) -> int:
        return self.labels.size


@dataclass(frozen=True)
class SimilarityGraph:
    """Sparse directed K-NN graph in CSR layout.

    Row i holds the ordered neighbor list of point i: ``indices[indptr[i]:
    indptr[i+1]]`` with matching ``weights``. Weights are finite,
    non-negative float32; no duplicate target within a row.
    """

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        indptr = np.ascontiguousarray(self.indptr, dtype=np.int64)
        indices = np.ascontiguousarray(self.indices, dtype=np.int64)
        weights = np.ascontiguousarray(self.weights, dtype=np.float32)
        if indptr.ndim != 1 or indptr.size < 2 or indptr[0] != 0:
            raise ValueError("indptr must be 1-D, start at 0, and have n+1 entries")
        if np.any(np.diff(indptr) < 0):
            raise ValueError("indptr must be non-decreasing")
        if indices.shape != weights.shape or indices.ndim != 1:
            raise ValueError("indices and weights must be 1-D and equally long")
        if indptr[-1] != indices.size:
            raise ValueError("indptr[-1] must equal the number of stored entries")
        n = indptr.size - 1
        if indices.size and (indices.min() < 0 or indices.max() >= n):
            raise ValueError("neighbor index out of range")
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return self.indptr.size - 1

    @property
    def nnz(self) -> int:
        return self.indices.size

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor indices and weights of point i, in stored order."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.weights[lo:hi]


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic sparse matrix P with the pre-normalization row sums.

    Same CSR layout as SimilarityGraph; ``probs`` are float64 probabilities
    and ``degrees[i]`` is the positive similarity mass of row i before
    normalization.
    """

    indptr: np.ndarray
    indices: np.ndarray
    probs: np.ndarray
    degrees: np.ndarray

    def __post_init__(self):
        indptr = np.ascontiguousarray(self.indptr, dtype=np.int64)
        indices = np.ascontiguousarray(self.indices, dtype=np.int64)
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        degrees = np.ascontiguousarray(self.degrees, dtype=np.float64)
        if indptr.ndim != 1 or indptr.size < 2 or indptr[0] != 0:
            raise ValueError("indptr must be 1-D, start at 0, and have n+1 entries")
        if indptr[-1] != indices.size or indices.shape != probs.shape:
            raise ValueError("inconsistent CSR arrays")
        if degrees.size != indptr.size - 1:
            raise ValueError("degrees must have one entry per point")
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "degrees", degrees)

    @property
    def n(self) -> int:
        return self.indptr.size - 1

    @property
    def nnz(self) -> int:
        return self.indices.size

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.probs[lo:hi]

    def row_sums(self) -> np.ndarray:
        """Per-row probability sums (should all be 1 for a valid matrix)."""
        cums = np.concatenate(([0.0], np.cumsum(self.probs)))
        return cums[self.indptr[1:]] - cums[self.indptr[:-1]]


@dataclass(frozen=True)
class DensityVector:
    """Per-point density plus diffusion bookkeeping.

    ``iterations`` and ``residual`` describe the fixed-point iteration that
    produced the vector; they are 0 for densities not obtained iteratively.
    """

    rho: np.ndarray
    iterations: int = 0
    residual: float = 0.0

    def __post_init__(self):
        rho = np.ascontiguousarray(self.rho, dtype=np.float64)
        if rho.ndim != 1 or rho.size < 1:
            raise ValueError("rho must be a non-empty 1-D array")
        object.__setattr__(self, "rho", rho)

    @property
    def n(self) -> int:
        return self.rho.size


NO_PARENT = -1


@dataclass(frozen=True)
class Clustering:
    """Forest of parent links plus a cluster id per point.

    ``parent[i]`` is the point i was connected to, or NO_PARENT for roots.
    ``parent_distance[i]`` is the link distance (NaN for roots). Roots are
    numbered by ascending point index, so cluster ids are contiguous and
    deterministic.
    """

    parent: np.ndarray
    cluster_id: np.ndarray
    parent_distance: np.ndarray

    def __post_init__(self):
        parent = np.ascontiguousarray(self.parent, dtype=np.int64)
        cid = np.ascontiguousarray(self.cluster_id, dtype=np.int64)
        dist = np.ascontiguousarray(self.parent_distance, dtype=np.float64)
        if not (parent.shape == cid.shape == dist.shape) or parent.ndim != 1:
            raise ValueError("parent, cluster_id and parent_distance must be 1-D and equally long")
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "cluster_id", cid)
        object.__setattr__(self, "parent_distance", dist)

    @property
    def n(self) -> int:
        return self.parent.size

    @property
    def num_clusters(self) -> int:
        return int(self.cluster_id.max()) + 1

    def roots(self) -> np.ndarray:
        return np.nonzero(self.parent == NO_PARENT)[0]


class FScore(NamedTuple):
    precision: float
    recall: float
    f: float


@dataclass(frozen=True)
class EvalReport:
    """Pairwise/BCubed scores, optionally with per-bucket sub-reports."""

    pairwise: FScore
    bcubed: FScore
    num_clusters: int
    buckets: dict[str, "EvalReport"] = field(default_factory=dict)
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out = {
            "pairwise": dict(self.pairwise._asdict()),
            "bcubed": dict(self.bcubed._asdict()),
            "num_clusters": self.num_clusters,
            "buckets": {name: sub.to_dict() for name, sub in self.buckets.items()},
        }
        if self.flags:
            out["flags"] = list(self.flags)
        return out
