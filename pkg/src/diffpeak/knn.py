"""Exact K-nearest-neighbor graph construction under cosine similarity."""

from __future__ import annotations

import numpy as np

from .model import FeatureMatrix, SimilarityGraph

_UNIT_NORM_TOL = 1e-4


def _check_unit_rows(values: np.ndarray) -> None:
    norms = np.linalg.norm(values.astype(np.float64), axis=1)
    bad = np.nonzero(np.abs(norms - 1.0) > _UNIT_NORM_TOL)[0]
    if bad.size:
        raise ValueError(
            f"features must be unit-normalized: row {int(bad[0])} has norm "
            f"{norms[bad[0]]:.6f} (pass normalize=True when reading)"
        )


def build_knn(
    features: FeatureMatrix,
    k: int,
    self_loop: bool = True,
    block_size: int = 512,
) -> SimilarityGraph:
    """Build the exact top-k cosine similarity graph by full scan.

    Each row lists the k most similar other points in descending similarity
    order, ties broken by ascending point index. Negative similarities are
    clamped to 0. With ``self_loop`` the point itself is prepended with
    weight 1, giving k+1 entries per row.

    Similarities are evaluated in float64 and the result does not depend on
    ``block_size`` or on the number of BLAS threads.
    """
    n = features.n
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k >= n:
        raise ValueError(f"k must be <= n-1 = {n - 1}, got {k}")
    _check_unit_rows(features.values)

    x = features.values.astype(np.float64)
    nbr_idx = np.empty((n, k), dtype=np.int64)
    nbr_sim = np.empty((n, k), dtype=np.float64)

    for start in range(0, n, block_size):
        stop = min(start + block_size, n)
        sims = x[start:stop] @ x.T
        rows = np.arange(start, stop)
        sims[rows - start, rows] = -np.inf  # self is handled separately

        cand = np.argpartition(sims, n - k, axis=1)[:, n - k :]
        cand_sims = np.take_along_axis(sims, cand, axis=1)
        thresh = cand_sims.min(axis=1)
        # argpartition cuts ties arbitrarily; rebuild rows where the k-th
        # value is shared so that ties go to the lowest index
        tied = np.nonzero((sims >= thresh[:, None]).sum(axis=1) > k)[0]
        for r in tied:
            row = sims[r]
            above = np.nonzero(row > thresh[r])[0]
            at = np.nonzero(row == thresh[r])[0][: k - above.size]
            cand[r] = np.concatenate([above, at])

        idx_sorted = np.sort(cand, axis=1)
        sims_sorted = np.take_along_axis(sims, idx_sorted, axis=1)
        order = np.argsort(-sims_sorted, axis=1, kind="stable")
        nbr_idx[start:stop] = np.take_along_axis(idx_sorted, order, axis=1)
        nbr_sim[start:stop] = np.take_along_axis(sims_sorted, order, axis=1)

    weights = np.maximum(nbr_sim, 0.0).astype(np.float32)
    if self_loop:
        nbr_idx = np.concatenate([np.arange(n, dtype=np.int64)[:, None], nbr_idx], axis=1)
        weights = np.concatenate(
            [np.ones((n, 1), dtype=np.float32), weights], axis=1
        )
    per_row = k + 1 if self_loop else k
    indptr = np.arange(n + 1, dtype=np.int64) * per_row
    return SimilarityGraph(
        indptr=indptr, indices=nbr_idx.reshape(-1), weights=weights.reshape(-1)
    )
