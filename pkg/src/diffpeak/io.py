"""Readers and writers for the on-disk formats.

All binary formats are little-endian. Readers validate the whole file before
returning and raise FormatError with the offending byte offset (or line
number for text formats); they never return partially filled structures.
Write/read pairs are bit-exact inverses on valid data.

Formats:
  features   "NDF1"  u32 n, u32 d, then n*d float32 row-major
  graph      "NDG1"  u32 n, then per point: u32 k_i, k_i * (u32 target, f32 weight)
  density    "NDD1"  u32 n, then n float64
  distances  "NDP1"  u32 n, u64 pair count, then (u32 i, u32 j, f32 d) records
  labels     UTF-8 text, one base-10 integer per line, LF terminated
  clustering UTF-8 text, one "point_index<TAB>cluster_id" per line
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .model import (
    Clustering,
    DensityVector,
    EvalReport,
    FeatureMatrix,
    FormatError,
    LabelVector,
    SimilarityGraph,
)

FEATURE_MAGIC = b"NDF1"
GRAPH_MAGIC = b"NDG1"
DENSITY_MAGIC = b"NDD1"
DISTANCE_MAGIC = b"NDP1"

_EDGE_DTYPE = np.dtype([("target", "<u4"), ("weight", "<f4")])
_PAIR_DTYPE = np.dtype([("i", "<u4"), ("j", "<u4"), ("d", "<f4")])


def _read_bytes(path) -> bytes:
    return Path(path).read_bytes()


def _check_magic(data: bytes, magic: bytes, path) -> None:
    if len(data) < 4 or data[:4] != magic:
        raise FormatError(f"{path}: bad magic at byte 0, expected {magic!r}")


def _need(data: bytes, offset: int, count: int, path, what: str) -> None:
    if len(data) < offset + count:
        raise FormatError(
            f"{path}: truncated {what} at byte {len(data)}, "
            f"expected {offset + count} bytes"
        )


def read_features(path, normalize: bool = False) -> FeatureMatrix:
    """Read a feature file, optionally unit-normalizing every row."""
    data = _read_bytes(path)
    _check_magic(data, FEATURE_MAGIC, path)
    _need(data, 4, 8, path, "header")
    n, d = struct.unpack_from("<II", data, 4)
    if n < 1 or d < 1:
        raise FormatError(f"{path}: header declares n={n}, d={d}; both must be >= 1")
    count = n * d
    _need(data, 12, 4 * count, path, "payload")
    if len(data) > 12 + 4 * count:
        raise FormatError(f"{path}: trailing data at byte {12 + 4 * count}")
    values = np.frombuffer(data, dtype="<f4", count=count, offset=12).reshape(n, d)
    bad = np.nonzero(~np.isfinite(values.ravel()))[0]
    if bad.size:
        raise FormatError(f"{path}: non-finite value at byte {12 + 4 * int(bad[0])}")
    values = values.astype(np.float32)  # copy out of the read-only buffer
    if normalize:
        norms = np.linalg.norm(values.astype(np.float64), axis=1)
        zero = np.nonzero(norms == 0.0)[0]
        if zero.size:
            raise ValueError(f"cannot normalize: row {int(zero[0])} has zero norm")
        values = (values / norms[:, None]).astype(np.float32)
    return FeatureMatrix(values)


def write_features(features: FeatureMatrix, path) -> None:
    with open(path, "wb") as fh:
        fh.write(FEATURE_MAGIC)
        fh.write(struct.pack("<II", features.n, features.d))
        fh.write(np.ascontiguousarray(features.values, dtype="<f4").tobytes())


def read_labels(path) -> LabelVector:
    """Read a label file: one non-negative base-10 integer per line."""
    raw = _read_bytes(path)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not valid UTF-8 ({exc})") from None
    if text == "":
        raise FormatError(f"{path}: no labels")
    if not text.endswith("\n"):
        raise FormatError(f"{path}: missing trailing newline")
    labels = []
    for lineno, line in enumerate(text[:-1].split("\n"), start=1):
        if line != line.strip() or not line:
            raise FormatError(f"{path}: line {lineno}: expected a bare integer")
        try:
            value = int(line)
        except ValueError:
            raise FormatError(f"{path}: line {lineno}: {line!r} is not an integer") from None
        if value < 0:
            raise FormatError(f"{path}: line {lineno}: labels must be non-negative")
        labels.append(value)
    return LabelVector(np.array(labels, dtype=np.int64))


def write_labels(labels: LabelVector, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for value in labels.labels:
            fh.write(f"{value}\n")


def read_graph(path) -> SimilarityGraph:
    """Read a similarity graph file and validate all invariants."""
    data = _read_bytes(path)
    _check_magic(data, GRAPH_MAGIC, path)
    _need(data, 4, 4, path, "header")
    (n,) = struct.unpack_from("<I", data, 4)
    if n < 1:
        raise FormatError(f"{path}: header declares n=0")
    offset = 8
    counts = np.empty(n, dtype=np.int64)
    rows_idx = []
    rows_w = []
    for i in range(n):
        _need(data, offset, 4, path, f"neighbor count of point {i}")
        (k_i,) = struct.unpack_from("<I", data, offset)
        offset += 4
        _need(data, offset, 8 * k_i, path, f"neighbor records of point {i}")
        records = np.frombuffer(data, dtype=_EDGE_DTYPE, count=k_i, offset=offset)
        targets = records["target"].astype(np.int64)
        weights = records["weight"]
        bad = np.nonzero(targets >= n)[0]
        if bad.size:
            raise FormatError(
                f"{path}: neighbor index {int(targets[bad[0]])} >= n={n} "
                f"at byte {offset + 8 * int(bad[0])}"
            )
        bad = np.nonzero(~(weights >= 0.0))[0]  # catches negatives and NaN
        if bad.size:
            raise FormatError(
                f"{path}: invalid weight {float(weights[bad[0]])!r} "
                f"at byte {offset + 8 * int(bad[0]) + 4}"
            )
        bad = np.nonzero(np.isinf(weights))[0]
        if bad.size:
            raise FormatError(
                f"{path}: non-finite weight at byte {offset + 8 * int(bad[0]) + 4}"
            )
        if np.unique(targets).size != targets.size:
            raise FormatError(f"{path}: duplicate neighbor index in row {i}")
        counts[i] = k_i
        rows_idx.append(targets)
        rows_w.append(weights.astype(np.float32))
        offset += 8 * k_i
    if len(data) > offset:
        raise FormatError(f"{path}: trailing data at byte {offset}")
    indptr = np.concatenate(([0], np.cumsum(counts)))
    indices = np.concatenate(rows_idx) if rows_idx else np.empty(0, dtype=np.int64)
    weights = np.concatenate(rows_w) if rows_w else np.empty(0, dtype=np.float32)
    return SimilarityGraph(indptr=indptr, indices=indices, weights=weights)


def write_graph(graph: SimilarityGraph, path) -> None:
    with open(path, "wb") as fh:
        fh.write(GRAPH_MAGIC)
        fh.write(struct.pack("<I", graph.n))
        for i in range(graph.n):
            idx, w = graph.row(i)
            fh.write(struct.pack("<I", idx.size))
            records = np.empty(idx.size, dtype=_EDGE_DTYPE)
            records["target"] = idx
            records["weight"] = w
            fh.write(records.tobytes())


def read_density(path) -> DensityVector:
    data = _read_bytes(path)
    _check_magic(data, DENSITY_MAGIC, path)
    _need(data, 4, 4, path, "header")
    (n,) = struct.unpack_from("<I", data, 4)
    if n < 1:
        raise FormatError(f"{path}: header declares n=0")
    _need(data, 8, 8 * n, path, "payload")
    if len(data) > 8 + 8 * n:
        raise FormatError(f"{path}: trailing data at byte {8 + 8 * n}")
    rho = np.frombuffer(data, dtype="<f8", count=n, offset=8)
    bad = np.nonzero(~np.isfinite(rho))[0]
    if bad.size:
        raise FormatError(f"{path}: non-finite density at byte {8 + 8 * int(bad[0])}")
    return DensityVector(rho=rho.astype(np.float64))


def write_density(density: DensityVector, path) -> None:
    with open(path, "wb") as fh:
        fh.write(DENSITY_MAGIC)
        fh.write(struct.pack("<I", density.n))
        fh.write(np.ascontiguousarray(density.rho, dtype="<f8").tobytes())


def read_distances(path):
    """Read a pairwise distance file into a DistanceGraph."""
    from .distance import DistanceGraph

    data = _read_bytes(path)
    _check_magic(data, DISTANCE_MAGIC, path)
    _need(data, 4, 12, path, "header")
    n, count = struct.unpack_from("<IQ", data, 4)
    if n < 1:
        raise FormatError(f"{path}: header declares n=0")
    _need(data, 16, 12 * count, path, "payload")
    if len(data) > 16 + 12 * count:
        raise FormatError(f"{path}: trailing data at byte {16 + 12 * count}")
    records = np.frombuffer(data, dtype=_PAIR_DTYPE, count=count, offset=16)
    i = records["i"].astype(np.int64)
    j = records["j"].astype(np.int64)
    d = records["d"].astype(np.float64)
    bad = np.nonzero(~(i < j))[0]
    if bad.size:
        raise FormatError(f"{path}: pair record {int(bad[0])} does not satisfy i < j")
    if j.size and j.max() >= n:
        raise FormatError(f"{path}: pair index out of range (n={n})")
    bad = np.nonzero(~((d >= 0.0) & (d <= 1.0)))[0]
    if bad.size:
        raise FormatError(
            f"{path}: distance out of [0, 1] at byte {16 + 12 * int(bad[0]) + 8}"
        )
    if count > 1:
        keys = i * n + j
        if np.any(np.diff(keys) <= 0):
            raise FormatError(f"{path}: pairs are not sorted and unique")
    return DistanceGraph(n=n, i=i, j=j, d=d)


def write_distances(dist, path) -> None:
    records = np.empty(dist.i.size, dtype=_PAIR_DTYPE)
    records["i"] = dist.i
    records["j"] = dist.j
    records["d"] = dist.d
    with open(path, "wb") as fh:
        fh.write(DISTANCE_MAGIC)
        fh.write(struct.pack("<IQ", dist.n, dist.i.size))
        fh.write(records.tobytes())


def read_clustering(path) -> Clustering:
    """Read the clustering text format back into a (parent-less) Clustering.

    Only cluster ids survive serialization; parent links and distances are
    not part of the format, so they come back empty.
    """
    raw = _read_bytes(path)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not valid UTF-8 ({exc})") from None
    if text == "":
        raise FormatError(f"{path}: empty clustering")
    if not text.endswith("\n"):
        raise FormatError(f"{path}: missing trailing newline")
    lines = text[:-1].split("\n")
    ids = np.empty(len(lines), dtype=np.int64)
    for lineno, line in enumerate(lines, start=1):
        parts = line.split("\t")
        if len(parts) != 2:
            raise FormatError(f"{path}: line {lineno}: expected 'index<TAB>cluster_id'")
        try:
            idx, cid = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"{path}: line {lineno}: non-integer field") from None
        if idx != lineno - 1:
            raise FormatError(
                f"{path}: line {lineno}: point index {idx} out of order "
                f"(expected {lineno - 1})"
            )
        if cid < 0:
            raise FormatError(f"{path}: line {lineno}: negative cluster id")
        ids[lineno - 1] = cid
    n = ids.size
    return Clustering(
        parent=np.full(n, -1, dtype=np.int64),
        cluster_id=ids,
        parent_distance=np.full(n, np.nan),
    )


def write_clustering(clustering: Clustering, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for idx, cid in enumerate(clustering.cluster_id):
            fh.write(f"{idx}\t{cid}\n")


def write_report(report: EvalReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")


def write_roc_csv(auc: float, curve: np.ndarray, path) -> None:
    """Dump an ROC curve as CSV with the AUC recorded in the header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# auc={auc:.12g}\n")
        fh.write("threshold,tpr,fpr\n")
        for threshold, tpr, fpr in curve:
            fh.write(f"{threshold:.12g},{tpr:.12g},{fpr:.12g}\n")
