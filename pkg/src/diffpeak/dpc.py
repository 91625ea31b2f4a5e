"""Density peak assignment: connect each point to its nearest denser neighbor.

Density comparisons use a strict total order (density, then lower index) so
exact ties cannot deadlock or create cycles; every parent strictly precedes
its child in that order, which makes the link structure a forest for any
input.
"""

from __future__ import annotations

import numpy as np

from .distance import DistanceGraph
from .model import NO_PARENT, Clustering, DensityVector


def _rho_array(rho) -> np.ndarray:
    if isinstance(rho, DensityVector):
        return rho.rho
    return np.ascontiguousarray(rho, dtype=np.float64)


def nearest_higher_density(rho, dist: DistanceGraph) -> tuple[np.ndarray, np.ndarray]:
    """Per point: the closest candidate that precedes it in the density order.

    Considers only pairs present in ``dist`` (absent pairs have distance 1).
    Ties on distance go to the lower point index. Returns (target, distance)
    arrays; points with no eligible candidate get (NO_PARENT, inf).
    """
    values = _rho_array(rho)
    if values.size != dist.n:
        raise ValueError(f"density has {values.size} points but distances have {dist.n}")
    src = np.concatenate([dist.i, dist.j])
    dst = np.concatenate([dist.j, dist.i])
    d = np.concatenate([dist.d, dist.d])
    # dst strictly precedes src: higher density, or equal density and lower index
    eligible = (values[dst] > values[src]) | (
        (values[dst] == values[src]) & (dst < src)
    )
    src, dst, d = src[eligible], dst[eligible], d[eligible]
    best_j = np.full(dist.n, NO_PARENT, dtype=np.int64)
    best_d = np.full(dist.n, np.inf, dtype=np.float64)
    if src.size:
        order = np.lexsort((dst, d, src))
        first = np.zeros(src.size, dtype=bool)
        first[0] = True
        first[1:] = src[order][1:] != src[order][:-1]
        pick = order[first]
        best_j[src[pick]] = dst[pick]
        best_d[src[pick]] = d[pick]
    return best_j, best_d


def label_forest(parent: np.ndarray) -> np.ndarray:
    """Cluster ids from parent links; roots numbered by ascending index."""
    n = parent.size
    root = np.where(parent == NO_PARENT, np.arange(n, dtype=np.int64), parent)
    while True:
        hop = root[root]
        if np.array_equal(hop, root):
            break
        root = hop
    roots = np.unique(root)
    lookup = np.full(n, -1, dtype=np.int64)
    lookup[roots] = np.arange(roots.size, dtype=np.int64)
    return lookup[root]


def dpc_assign(rho, dist: DistanceGraph, tau: float) -> Clustering:
    """Run the peak assignment with uniform connecting threshold ``tau``.

    A point links to its nearest candidate of higher density when that
    distance is strictly below tau; otherwise it becomes a root (its own
    cluster center). Trees of links are the clusters.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    best_j, best_d = nearest_higher_density(rho, dist)
    return _assign(best_j, best_d, tau)


def sweep_tau(rho, dist: DistanceGraph, taus) -> list[Clustering]:
    """dpc_assign for several thresholds, sharing one candidate search."""
    for tau in taus:
        if not 0.0 < tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {tau}")
    best_j, best_d = nearest_higher_density(rho, dist)
    return [_assign(best_j, best_d, tau) for tau in taus]


def _assign(best_j: np.ndarray, best_d: np.ndarray, tau: float) -> Clustering:
    connect = best_d < tau
    parent = np.where(connect, best_j, NO_PARENT)
    parent_distance = np.where(connect, best_d, np.nan)
    return Clustering(
        parent=parent,
        cluster_id=label_forest(parent),
        parent_distance=parent_distance,
    )
