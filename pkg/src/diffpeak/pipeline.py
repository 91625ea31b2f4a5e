"""End-to-end wiring: graph -> transition -> density -> distance -> peaks."""

from __future__ import annotations

from dataclasses import dataclass

from . import density as density_mod
from . import distance as distance_mod
from .dpc import dpc_assign
from .knn import build_knn
from .model import Clustering, DensityVector, FeatureMatrix, SimilarityGraph, TransitionMatrix
from .transition import build_transition

DENSITY_MODES = ("ndde", "ball")
DISTANCE_MODES = ("tpdi", "cosine")

DEFAULT_K = 80
DEFAULT_TAU = 0.7
DEFAULT_BALL_RADIUS = 0.3


@dataclass(frozen=True)
class PipelineResult:
    clustering: Clustering
    graph: SimilarityGraph
    transition: TransitionMatrix
    density: DensityVector
    distances: distance_mod.DistanceGraph


def run_pipeline(
    features: FeatureMatrix | None = None,
    graph: SimilarityGraph | None = None,
    k: int = DEFAULT_K,
    tau: float = DEFAULT_TAU,
    epsilon: float = density_mod.DEFAULT_EPSILON,
    max_iter: int = density_mod.DEFAULT_MAX_ITER,
    density: str = "ndde",
    distance: str = "tpdi",
    radius: float = DEFAULT_BALL_RADIUS,
) -> PipelineResult:
    """Cluster one dataset with any density/distance combination.

    Either pass ``features`` (a k-NN graph with self loops is built) or a
    prebuilt ``graph`` (the external-graph path for similarities learned
    elsewhere). The cosine distance additionally needs ``features``.
    """
    if density not in DENSITY_MODES:
        raise ValueError(f"density must be one of {DENSITY_MODES}, got {density!r}")
    if distance not in DISTANCE_MODES:
        raise ValueError(f"distance must be one of {DISTANCE_MODES}, got {distance!r}")
    if graph is None:
        if features is None:
            raise ValueError("either features or a graph is required")
        graph = build_knn(features, k=k, self_loop=True)
    if distance == "cosine" and features is None:
        raise ValueError("cosine distance requires features")

    transition = build_transition(graph)
    if density == "ndde":
        rho = density_mod.ndde(transition, epsilon=epsilon, max_iter=max_iter)
    else:
        rho = density_mod.ball_density(graph, radius=radius)
    if distance == "tpdi":
        dist = distance_mod.tpdi(transition)
    else:
        dist = distance_mod.cosine_distance(features, graph)
    clustering = dpc_assign(rho, dist, tau)
    return PipelineResult(
        clustering=clustering,
        graph=graph,
        transition=transition,
        density=rho,
        distances=dist,
    )
