import numpy as np
import pytest

from diffpeak import SimilarityGraph, TransitionMatrix


def random_similarity_graph(rng, n, max_k, self_loop=True):
    """Random valid similarity graph with positive weights."""
    rows_idx, rows_w, counts = [], [], []
    for i in range(n):
        k = int(rng.integers(1, max_k + 1))
        others = rng.choice(n, size=min(k, n), replace=False)
        if self_loop:
            others = np.concatenate(([i], others[others != i]))
        targets = np.unique(others)[: max(1, k)]
        weights = rng.uniform(0.05, 1.0, targets.size).astype(np.float32)
        rows_idx.append(targets)
        rows_w.append(weights)
        counts.append(targets.size)
    indptr = np.concatenate(([0], np.cumsum(counts)))
    return SimilarityGraph(
        indptr=indptr,
        indices=np.concatenate(rows_idx),
        weights=np.concatenate(rows_w),
    )


def random_transition(rng, n, max_k, self_loop=True):
    """Random row-stochastic transition matrix in CSR form."""
    rows_idx, rows_p, counts = [], [], []
    for i in range(n):
        k = int(rng.integers(1, max_k + 1))
        targets = rng.choice(n, size=min(k, n), replace=False)
        if self_loop and i not in targets:
            targets = np.concatenate(([i], targets[: k - 1] if k > 1 else targets[:0]))
        targets = np.unique(targets)
        weights = rng.uniform(0.05, 1.0, targets.size)
        rows_idx.append(targets)
        rows_p.append(weights / weights.sum())
        counts.append(targets.size)
    indptr = np.concatenate(([0], np.cumsum(counts)))
    return TransitionMatrix(
        indptr=indptr,
        indices=np.concatenate(rows_idx),
        probs=np.concatenate(rows_p),
        degrees=np.ones(n),
    )


def transition_from_rows(rows, n=None):
    """Build a TransitionMatrix from {row: {col: prob}} dictionaries."""
    n = n if n is not None else len(rows)
    indptr = [0]
    indices, probs = [], []
    for i in range(n):
        cols = sorted(rows.get(i, {}))
        indices.extend(cols)
        probs.extend(rows[i][c] for c in cols)
        indptr.append(len(indices))
    return TransitionMatrix(
        indptr=np.array(indptr, dtype=np.int64),
        indices=np.array(indices, dtype=np.int64),
        probs=np.array(probs, dtype=np.float64),
        degrees=np.ones(n),
    )


def dense_probs(p):
    """Dense copy of a TransitionMatrix (test scale only)."""
    dense = np.zeros((p.n, p.n))
    for i in range(p.n):
        idx, pr = p.row(i)
        dense[i, idx] = pr
    return dense


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
