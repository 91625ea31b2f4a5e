"""Density peak clustering on k-NN graphs with diffusion density (stationary
random-walk mass) and transition-probability pair distances, plus the
classic ball-density / cosine baselines, evaluation metrics, and a synthetic
benchmark generator."""

from .density import ball_density, diffuse_step, ndde
from .distance import DistanceGraph, candidate_pairs, cosine_distance, tpdi
from .dpc import dpc_assign, nearest_higher_density, sweep_tau
from .knn import build_knn
from .metrics import (
    BucketSpec,
    bcubed_f,
    bucket_clusters,
    cluster_sparsity,
    evaluate,
    pairwise_f,
    roc_auc,
)
from .model import (
    Clustering,
    DensityVector,
    EvalReport,
    FeatureMatrix,
    FormatError,
    FScore,
    LabelVector,
    SimilarityGraph,
    TransitionMatrix,
)
from .pipeline import PipelineResult, run_pipeline
from .synth import SynthConfig, generate, stack
from .transition import build_transition

__version__ = "0.1.0"

__all__ = [
    "BucketSpec",
    "Clustering",
    "DensityVector",
    "DistanceGraph",
    "EvalReport",
    "FScore",
    "FeatureMatrix",
    "FormatError",
    "LabelVector",
    "PipelineResult",
    "SimilarityGraph",
    "SynthConfig",
    "TransitionMatrix",
    "ball_density",
    "bcubed_f",
    "bucket_clusters",
    "build_knn",
    "build_transition",
    "candidate_pairs",
    "cluster_sparsity",
    "cosine_distance",
    "diffuse_step",
    "dpc_assign",
    "evaluate",
    "generate",
    "ndde",
    "nearest_higher_density",
    "pairwise_f",
    "roc_auc",
    "run_pipeline",
    "stack",
    "sweep_tau",
    "tpdi",
]
