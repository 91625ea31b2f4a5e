"""Row normalization of a similarity graph into a transition matrix."""

from __future__ import annotations

import numpy as np

from .model import SimilarityGraph, TransitionMatrix


def _row_sums(indptr: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Exact per-row sums of a CSR value array."""
    n = indptr.size - 1
    sums = np.zeros(n, dtype=np.float64)
    nonempty = indptr[:-1] < indptr[1:]
    if np.any(nonempty):
        sums[nonempty] = np.add.reduceat(values, indptr[:-1][nonempty])
    return sums


def build_transition(graph: SimilarityGraph) -> TransitionMatrix:
    """Divide every row of the similarity graph by its weight sum.

    degrees[i] is the row sum before normalization. The sparsity pattern is
    preserved, so entries that were 0 stay 0. A row whose weights are all
    zero cannot be normalized; re-running the graph build with self loops
    guarantees positive mass on every row.
    """
    w = graph.weights.astype(np.float64)
    if np.any(~np.isfinite(w)) or np.any(w < 0.0):
        raise ValueError("graph weights must be finite and non-negative")
    degrees = _row_sums(graph.indptr, w)
    dead = np.nonzero(degrees <= 0.0)[0]
    if dead.size:
        raise ValueError(
            f"point {int(dead[0])} has no positive similarity mass; "
            f"rebuild the graph with self_loop=True"
        )
    probs = w / np.repeat(degrees, np.diff(graph.indptr))
    return TransitionMatrix(
        indptr=graph.indptr.copy(),
        indices=graph.indices.copy(),
        probs=probs,
        degrees=degrees,
    )
