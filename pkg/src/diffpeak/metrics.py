"""Clustering evaluation: Pairwise/BCubed F, sparsity buckets, ROC/AUC."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.stats

from .distance import DistanceGraph
from .model import Clustering, EvalReport, FeatureMatrix, FScore, LabelVector


def _labels_of(x, name: str) -> np.ndarray:
    if isinstance(x, Clustering):
        return x.cluster_id
    if isinstance(x, LabelVector):
        return x.labels
    arr = np.ascontiguousarray(x, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D")
    return arr


def _contingency(pred: np.ndarray, truth: np.ndarray):
    """Cluster sizes, class sizes, and joint cell counts via label codes."""
    _, pred_codes = np.unique(pred, return_inverse=True)
    _, truth_codes = np.unique(truth, return_inverse=True)
    pred_sizes = np.bincount(pred_codes)
    truth_sizes = np.bincount(truth_codes)
    joint = pred_codes * truth_sizes.size + truth_codes
    cells, cell_counts = np.unique(joint, return_counts=True)
    return pred_codes, truth_codes, pred_sizes, truth_sizes, cells, cell_counts


def _pairs(counts: np.ndarray) -> int:
    c = counts.astype(np.int64)
    return int((c * (c - 1) // 2).sum())


def _f(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def pairwise_f(pred, truth) -> FScore:
    """Precision/recall/F over same-cluster point pairs.

    Counted through the (cluster, class) contingency table, so no pair is
    ever enumerated. A side with zero pairs contributes 0 to that ratio.
    """
    pred, truth = _labels_of(pred, "pred"), _labels_of(truth, "truth")
    if pred.size != truth.size:
        raise ValueError(f"length mismatch: {pred.size} vs {truth.size}")
    _, _, pred_sizes, truth_sizes, _, cell_counts = _contingency(pred, truth)
    same_pred = _pairs(pred_sizes)
    same_truth = _pairs(truth_sizes)
    hits = _pairs(cell_counts)
    precision = hits / same_pred if same_pred > 0 else 0.0
    recall = hits / same_truth if same_truth > 0 else 0.0
    return FScore(precision, recall, _f(precision, recall))


def bcubed_f(pred, truth) -> FScore:
    """Per-point precision/recall averaged over all points, then combined."""
    pred, truth = _labels_of(pred, "pred"), _labels_of(truth, "truth")
    if pred.size != truth.size:
        raise ValueError(f"length mismatch: {pred.size} vs {truth.size}")
    _, _, pred_sizes, truth_sizes, cells, cell_counts = _contingency(pred, truth)
    n = pred.size
    cell_pred = cells // truth_sizes.size
    cell_truth = cells % truth_sizes.size
    counts = cell_counts.astype(np.float64)
    precision = float((counts**2 / pred_sizes[cell_pred]).sum()) / n
    recall = float((counts**2 / truth_sizes[cell_truth]).sum()) / n
    return FScore(precision, recall, _f(precision, recall))


def cluster_sparsity(features: FeatureMatrix, members) -> float:
    """One minus the mean cosine similarity over ordered member pairs."""
    members = np.ascontiguousarray(members, dtype=np.int64)
    m = members.size
    if m < 2:
        raise ValueError("sparsity is undefined for clusters with fewer than 2 members")
    x = features.values[members].astype(np.float64)
    gram = x @ x.T
    total = gram.sum() - np.trace(gram)
    return float(1.0 - total / (m * (m - 1)))


@dataclass(frozen=True)
class BucketSpec:
    """How to split ground-truth clusters into ranked subsets."""

    axis: str  # "size" or "sparsity"
    count: int = 5

    def __post_init__(self):
        if self.axis not in ("size", "sparsity"):
            raise ValueError(f"axis must be 'size' or 'sparsity', got {self.axis!r}")
        if self.count < 2:
            raise ValueError(f"bucket count must be >= 2, got {self.count}")


def bucket_clusters(
    truth, features: FeatureMatrix | None, spec: BucketSpec
) -> dict[str, np.ndarray]:
    """Rank ground-truth clusters and split them into near-equal buckets.

    Size ranking is descending (bucket 1 holds the largest clusters);
    sparsity ranking is ascending (bucket 1 holds the densest). Ties break
    by ascending cluster label. Buckets get floor or ceil of m/count
    clusters each, the earlier buckets taking the extras. Returns bucket
    name ("sz-1".."sz-k" or "sp-1".."sp-k") to cluster labels.
    """
    truth = _labels_of(truth, "truth")
    labels, sizes = np.unique(truth, return_counts=True)
    if labels.size < spec.count:
        raise ValueError(
            f"cannot split {labels.size} clusters into {spec.count} buckets"
        )
    if spec.axis == "size":
        order = np.lexsort((labels, -sizes.astype(np.int64)))
        prefix = "sz"
    else:
        if features is None:
            raise ValueError("sparsity bucketing requires features")
        sparsity = np.zeros(labels.size)  # singletons rank as maximally dense
        for idx, label in enumerate(labels):
            members = np.nonzero(truth == label)[0]
            if members.size >= 2:
                sparsity[idx] = cluster_sparsity(features, members)
        order = np.lexsort((labels, sparsity))
        prefix = "sp"
    chunks = np.array_split(labels[order], spec.count)
    return {f"{prefix}-{b + 1}": chunk for b, chunk in enumerate(chunks)}


def evaluate(pred, truth, buckets: dict[str, np.ndarray] | None = None) -> EvalReport:
    """Full report: both F-scores, cluster count, optional bucket rows.

    Each bucket is scored on the points whose ground-truth cluster belongs
    to it, with predicted labels taken as-is on that restriction; the
    top-level row is the unrestricted evaluation.
    """
    pred, truth = _labels_of(pred, "pred"), _labels_of(truth, "truth")
    if pred.size != truth.size:
        raise ValueError(f"length mismatch: {pred.size} vs {truth.size}")
    sub_reports: dict[str, EvalReport] = {}
    if buckets:
        for name, cluster_labels in buckets.items():
            mask = np.isin(truth, cluster_labels)
            if not mask.any():
                warnings.warn(f"bucket {name} contains no points; omitted")
                continue
            sub_reports[name] = evaluate(pred[mask], truth[mask])
    flags = []
    if _pairs(np.unique(pred, return_counts=True)[1]) == 0:
        flags.append("no_predicted_pairs")
    if _pairs(np.unique(truth, return_counts=True)[1]) == 0:
        flags.append("no_truth_pairs")
    return EvalReport(
        pairwise=pairwise_f(pred, truth),
        bcubed=bcubed_f(pred, truth),
        num_clusters=int(np.unique(pred).size),
        buckets=sub_reports,
        flags=tuple(flags),
    )


def roc_auc(dist: DistanceGraph, truth) -> tuple[float, np.ndarray]:
    """ROC of 1 - distance as a same-identity score over emitted pairs.

    AUC is the tie-averaged rank statistic. Also returns the curve as an
    array of (threshold, tpr, fpr) rows over descending score thresholds,
    starting from (inf, 0, 0).
    """
    truth = _labels_of(truth, "truth")
    if dist.num_pairs == 0:
        raise ValueError("distance graph has no pairs")
    if truth.size != dist.n:
        raise ValueError(f"length mismatch: {truth.size} vs {dist.n}")
    scores = 1.0 - dist.d
    positive = truth[dist.i] == truth[dist.j]
    num_pos = int(positive.sum())
    num_neg = positive.size - num_pos
    if num_pos == 0 or num_neg == 0:
        raise ValueError("AUC undefined: all pairs belong to one class")
    ranks = scipy.stats.rankdata(scores)
    auc = (ranks[positive].sum() - num_pos * (num_pos + 1) / 2) / (num_pos * num_neg)

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    tps = np.cumsum(positive[order])
    fps = np.cumsum(~positive[order])
    last = np.nonzero(np.diff(sorted_scores))[0]  # last entry of each tie group
    cut = np.concatenate([last, [sorted_scores.size - 1]])
    curve = np.column_stack(
        [
            np.concatenate([[np.inf], sorted_scores[cut]]),
            np.concatenate([[0.0], tps[cut] / num_pos]),
            np.concatenate([[0.0], fps[cut] / num_neg]),
        ]
    )
    return float(auc), curve
