"""Pair-wise distances over common-neighbor supports.

The full n-by-n distance matrix is never formed. Only unordered pairs whose
rows share at least one strictly positive support index can have a distance
below 1, so those are the only pairs materialized; everything else is an
implicit 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .model import FeatureMatrix, SimilarityGraph, TransitionMatrix
from .knn import _check_unit_rows


@dataclass(frozen=True)
class DistanceGraph:
    """Sparse symmetric pair distances, stored once per pair with i < j.

    Pairs are sorted lexicographically by (i, j). A missing pair means
    distance 1 (no common neighbors).
    """

    n: int
    i: np.ndarray
    j: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        i = np.ascontiguousarray(self.i, dtype=np.int64)
        j = np.ascontiguousarray(self.j, dtype=np.int64)
        d = np.ascontiguousarray(self.d, dtype=np.float64)
        if not (i.shape == j.shape == d.shape) or i.ndim != 1:
            raise ValueError("i, j, d must be 1-D and equally long")
        if i.size and not np.all(i < j):
            raise ValueError("pairs must satisfy i < j")
        if i.size and (j.max() >= self.n or i.min() < 0):
            raise ValueError("pair index out of range")
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "d", d)

    @property
    def num_pairs(self) -> int:
        return self.i.size

    def pair_array(self) -> np.ndarray:
        """The (num_pairs, 2) array of (i, j) pairs."""
        return np.column_stack([self.i, self.j])


def _support(rows) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    """CSR arrays of ``rows`` restricted to strictly positive entries.

    Accepts a TransitionMatrix or a SimilarityGraph; explicit zeros (for
    example clamped negative similarities) do not count as support.
    """
    if isinstance(rows, TransitionMatrix):
        values = rows.probs
    elif isinstance(rows, SimilarityGraph):
        values = rows.weights.astype(np.float64)
    else:
        raise TypeError(f"expected TransitionMatrix or SimilarityGraph, got {type(rows)!r}")
    keep = values > 0.0
    kept = np.concatenate(([0], np.cumsum(keep, dtype=np.int64)))
    indptr = kept[rows.indptr]
    return rows.n, indptr, rows.indices[keep], values[keep]


def candidate_pairs(rows, max_bucket: int | None = None) -> np.ndarray:
    """All unordered pairs of rows sharing a positive support index.

    Built from an inverted list per support index: every pair of rows that
    both contain index c is emitted, then deduplicated. ``max_bucket`` caps
    the per-index list length (keeping the lowest row indices) to bound the
    quadratic blow-up on hub indices; with the default None the result is
    exact. Returns a (m, 2) int64 array sorted by (i, j).
    """
    n, indptr, indices, _ = _support(rows)
    row_of = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    order = np.argsort(indices, kind="stable")  # rows stay ascending per index
    cols = indices[order]
    members = row_of[order]
    starts = np.concatenate(([0], np.nonzero(np.diff(cols))[0] + 1, [cols.size]))
    encoded: list[np.ndarray] = []
    for b in range(starts.size - 1):
        bucket = members[starts[b] : starts[b + 1]]
        if max_bucket is not None and bucket.size > max_bucket:
            bucket = bucket[:max_bucket]
        if bucket.size < 2:
            continue
        a, c = np.triu_indices(bucket.size, k=1)
        encoded.append(bucket[a] * n + bucket[c])
    if not encoded:
        return np.empty((0, 2), dtype=np.int64)
    unique = np.unique(np.concatenate(encoded))
    return np.column_stack([unique // n, unique % n])


def tpdi(p: TransitionMatrix, block_size: int = 2048) -> DistanceGraph:
    """Transition-probability distance for every co-supported pair.

    d[i, j] = 1 - sum_c sqrt(p[i, c] * p[j, c]) over the common support
    indices c of rows i and j, clamped to [0, 1]. Evaluated blockwise as a
    sparse product of the element-wise square root of p against its own
    transpose, which touches exactly the co-supported pairs.
    """
    n, indptr, indices, values = _support(p)
    root = sp.csr_matrix((np.sqrt(values), indices, indptr), shape=(n, n))
    root_t = root.T.tocsc()
    out_i: list[np.ndarray] = []
    out_j: list[np.ndarray] = []
    out_d: list[np.ndarray] = []
    for start in range(0, n, block_size):
        stop = min(start + block_size, n)
        overlap = (root[start:stop] @ root_t).tocoo()
        rows = overlap.row.astype(np.int64) + start
        cols = overlap.col.astype(np.int64)
        keep = cols > rows
        rows, cols = rows[keep], cols[keep]
        dist = np.clip(1.0 - overlap.data[keep], 0.0, 1.0)
        order = np.lexsort((cols, rows))
        out_i.append(rows[order])
        out_j.append(cols[order])
        out_d.append(dist[order])
    return DistanceGraph(
        n=n,
        i=np.concatenate(out_i) if out_i else np.empty(0, dtype=np.int64),
        j=np.concatenate(out_j) if out_j else np.empty(0, dtype=np.int64),
        d=np.concatenate(out_d) if out_d else np.empty(0, dtype=np.float64),
    )


def cosine_distance(
    features: FeatureMatrix,
    graph: SimilarityGraph,
    max_bucket: int | None = None,
    chunk: int = 1 << 20,
) -> DistanceGraph:
    """Baseline distance 1 - cos(x_i, x_j) over the graph's candidate pairs.

    The candidate set is the same co-support pair set tpdi would emit for
    this graph, which keeps the two distances comparable pair for pair.
    """
    _check_unit_rows(features.values)
    if features.n != graph.n:
        raise ValueError(f"features have {features.n} rows but graph has {graph.n}")
    pairs = candidate_pairs(graph, max_bucket=max_bucket)
    x = features.values.astype(np.float64)
    d = np.empty(pairs.shape[0], dtype=np.float64)
    for start in range(0, pairs.shape[0], chunk):
        stop = min(start + chunk, pairs.shape[0])
        block = pairs[start:stop]
        dots = np.einsum("ij,ij->i", x[block[:, 0]], x[block[:, 1]])
        d[start:stop] = np.clip(1.0 - dots, 0.0, 1.0)
    return DistanceGraph(n=features.n, i=pairs[:, 0], j=pairs[:, 1], d=d)
