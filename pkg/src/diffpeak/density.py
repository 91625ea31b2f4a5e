"""Point-wise density: diffusion fixed point and the ball-count baseline."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .model import DensityVector, SimilarityGraph, TransitionMatrix
from .transition import _row_sums

ROW_SUM_TOL = 1e-9

DEFAULT_EPSILON = 0.05
DEFAULT_MAX_ITER = 200


def _check_row_stochastic(p: TransitionMatrix) -> None:
    sums = _row_sums(p.indptr, p.probs)
    bad = np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
    if bad.size:
        raise ValueError(
            f"transition matrix is not row-stochastic: row {int(bad[0])} "
            f"sums to {sums[bad[0]]!r}"
        )
    if np.any(p.probs < 0.0) or np.any(p.probs > 1.0):
        raise ValueError("transition probabilities must lie in [0, 1]")


def _to_csr(p: TransitionMatrix) -> sp.csr_matrix:
    return sp.csr_matrix((p.probs, p.indices, p.indptr), shape=(p.n, p.n))


def diffuse_step(p: TransitionMatrix, rho: np.ndarray) -> np.ndarray:
    """One mass-redistribution step: rho'[j] = sum_i rho[i] * p[i, j].

    Every point sends its current density to its neighbors in proportion to
    the outgoing transition probabilities, so the total mass is conserved.
    """
    return _to_csr(p).T @ np.asarray(rho, dtype=np.float64)


def ndde(
    p: TransitionMatrix,
    epsilon: float = DEFAULT_EPSILON,
    max_iter: int = DEFAULT_MAX_ITER,
) -> DensityVector:
    """Diffusion density: the stationary mass of the random walk on p.

    Starts from the all-ones vector and repeats mass-redistribution steps
    until the Euclidean norm of the update drops to ``epsilon`` or
    ``max_iter`` steps have run. Self loops on every row (the k+1 graph
    layout) keep the chain aperiodic so the iteration settles on every
    closed component.
    """
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    _check_row_stochastic(p)
    matrix = _to_csr(p).T.tocsc()  # columns of P == outgoing rows; no copy
    rho = np.ones(p.n, dtype=np.float64)
    iterations = 0
    residual = np.inf
    while iterations < max_iter:
        nxt = matrix @ rho
        iterations += 1
        if not np.all(np.isfinite(nxt)):
            raise ArithmeticError(f"non-finite density at iteration {iterations}")
        residual = float(np.linalg.norm(nxt - rho))
        rho = nxt
        if residual <= epsilon:
            break
    return DensityVector(rho=rho, iterations=iterations, residual=residual)


def ball_density(graph: SimilarityGraph, radius: float) -> DensityVector:
    """Classic density: neighbors within cosine distance ``radius``.

    rho[i] counts the stored neighbors j != i whose cosine distance
    1 - weight is at most the radius. Weights must be cosine similarities.
    """
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    row_of = np.repeat(np.arange(graph.n), np.diff(graph.indptr))
    within = (graph.indices != row_of) & (
        1.0 - graph.weights.astype(np.float64) <= radius
    )
    rho = np.bincount(row_of[within], minlength=graph.n).astype(np.float64)
    return DensityVector(rho=rho)
