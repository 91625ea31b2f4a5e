"""Command-line front end for the clustering pipeline.

Exit codes: 0 success, 2 usage or validation error, 1 runtime/format error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np
from threadpoolctl import threadpool_limits

from . import io
from .dpc import dpc_assign
from .knn import build_knn
from .metrics import BucketSpec, bucket_clusters, evaluate, roc_auc
from .model import FormatError
from .pipeline import (
    DEFAULT_BALL_RADIUS,
    DEFAULT_K,
    DEFAULT_TAU,
    run_pipeline,
)
from .density import DEFAULT_EPSILON, DEFAULT_MAX_ITER
from .synth import SynthConfig, generate


def _add_threads(parser) -> None:
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="cap internal (BLAS) parallelism; the output does not depend on it",
    )


def _parse_size_law(text: str) -> tuple[int, int, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected min:max:skew")
    return int(parts[0]), int(parts[1]), float(parts[2])


def _parse_noise(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected sigma_min:sigma_max")
    return float(parts[0]), float(parts[1])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffpeak",
        description="Density peak clustering with diffusion density and "
        "transition-probability distances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_knn = sub.add_parser("knn", help="build and write a k-NN similarity graph")
    p_knn.add_argument("--features", required=True)
    p_knn.add_argument("--k", type=int, required=True)
    p_knn.add_argument("--no-self-loop", action="store_true")
    p_knn.add_argument("--normalize", action="store_true", help="unit-normalize rows on read")
    p_knn.add_argument("--out", required=True)
    _add_threads(p_knn)
    p_knn.set_defaults(func=cmd_knn)

    p_cluster = sub.add_parser("cluster", help="run the full clustering pipeline")
    p_cluster.add_argument("--graph", help="prebuilt similarity graph file")
    p_cluster.add_argument("--features", help="feature file (to build the graph, and for cosine)")
    p_cluster.add_argument("--k", type=int, default=None, help=f"neighbors when building (default {DEFAULT_K})")
    p_cluster.add_argument("--normalize", action="store_true")
    p_cluster.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p_cluster.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p_cluster.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p_cluster.add_argument("--density", choices=("ndde", "ball"), default="ndde")
    p_cluster.add_argument("--distance", choices=("tpdi", "cosine"), default="tpdi")
    p_cluster.add_argument("--radius", type=float, default=DEFAULT_BALL_RADIUS,
                           help="ball-density cosine radius")
    p_cluster.add_argument("--out", required=True)
    p_cluster.add_argument("--report", help="write a JSON run summary here")
    p_cluster.add_argument("--density-out", help="write the density vector here")
    p_cluster.add_argument("--distances-out", help="write the pair distances here")
    _add_threads(p_cluster)
    p_cluster.set_defaults(func=cmd_cluster)

    p_eval = sub.add_parser("eval", help="score a clustering against ground truth")
    p_eval.add_argument("--pred", required=True)
    p_eval.add_argument("--truth", required=True)
    p_eval.add_argument("--features", help="needed for sparsity buckets")
    p_eval.add_argument("--buckets", choices=("size", "sparsity"))
    p_eval.add_argument("--num-buckets", type=int, default=5)
    p_eval.add_argument("--json", required=True)
    p_eval.set_defaults(func=cmd_eval)

    p_synth = sub.add_parser("synth", help="generate a labeled synthetic dataset")
    p_synth.add_argument("--clusters", type=int, required=True)
    p_synth.add_argument("--dim", type=int, required=True)
    p_synth.add_argument("--sizes", type=_parse_size_law, required=True, metavar="MIN:MAX:SKEW")
    p_synth.add_argument("--noise", type=_parse_noise, required=True, metavar="S0:S1")
    p_synth.add_argument("--seed", type=int, required=True)
    p_synth.add_argument("--out-prefix", required=True)
    p_synth.set_defaults(func=cmd_synth)

    p_roc = sub.add_parser("roc", help="ROC curve and AUC over pair distances")
    p_roc.add_argument("--dist", required=True)
    p_roc.add_argument("--truth", required=True)
    p_roc.add_argument("--csv", required=True)
    p_roc.set_defaults(func=cmd_roc)

    return parser


def cmd_knn(args) -> int:
    features = io.read_features(args.features, normalize=args.normalize)
    graph = build_knn(features, k=args.k, self_loop=not args.no_self_loop)
    io.write_graph(graph, args.out)
    print(f"wrote {args.out}: n={graph.n}, {graph.nnz} edges")
    return 0


def cmd_cluster(args) -> int:
    if args.graph and args.k is not None:
        raise ValueError("--k only applies when building from --features; drop it with --graph")
    if not args.graph and not args.features:
        raise ValueError("either --graph or --features is required")
    features = io.read_features(args.features, normalize=args.normalize) if args.features else None
    graph = io.read_graph(args.graph) if args.graph else None
    result = run_pipeline(
        features=features,
        graph=graph,
        k=args.k if args.k is not None else DEFAULT_K,
        tau=args.tau,
        epsilon=args.epsilon,
        max_iter=args.max_iter,
        density=args.density,
        distance=args.distance,
        radius=args.radius,
    )
    io.write_clustering(result.clustering, args.out)
    if args.density_out:
        io.write_density(result.density, args.density_out)
    if args.distances_out:
        io.write_distances(result.distances, args.distances_out)
    if args.report:
        import json

        summary = {
            "n": result.clustering.n,
            "num_clusters": result.clustering.num_clusters,
            "tau": args.tau,
            "density": args.density,
            "distance": args.distance,
            "density_iterations": result.density.iterations,
            "density_residual": result.density.residual,
            "num_pairs": result.distances.num_pairs,
        }
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    print(
        f"wrote {args.out}: n={result.clustering.n}, "
        f"{result.clustering.num_clusters} clusters"
    )
    return 0


def cmd_eval(args) -> int:
    pred = io.read_clustering(args.pred)
    truth = io.read_labels(args.truth)
    if pred.n != truth.n:
        raise ValueError(f"pred has {pred.n} points but truth has {truth.n}")
    buckets = None
    if args.buckets:
        features = None
        if args.buckets == "sparsity":
            if not args.features:
                raise ValueError("--buckets sparsity requires --features")
            features = io.read_features(args.features)
        spec = BucketSpec(axis=args.buckets, count=args.num_buckets)
        buckets = bucket_clusters(truth, features, spec)
    report = evaluate(pred, truth, buckets=buckets)
    io.write_report(report, args.json)
    print(
        f"wrote {args.json}: pairwise F={report.pairwise.f:.4f}, "
        f"bcubed F={report.bcubed.f:.4f}, {report.num_clusters} clusters"
    )
    return 0


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        num_clusters=args.clusters,
        dim=args.dim,
        size_law=args.sizes,
        noise_range=args.noise,
        seed=args.seed,
    )
    features, labels = generate(cfg)
    io.write_features(features, f"{args.out_prefix}.features")
    io.write_labels(labels, f"{args.out_prefix}.labels")
    print(f"wrote {args.out_prefix}.features / .labels: n={features.n}, d={features.d}")
    return 0


def cmd_roc(args) -> int:
    dist = io.read_distances(args.dist)
    truth = io.read_labels(args.truth)
    auc, curve = roc_auc(dist, truth)
    io.write_roc_csv(auc, curve, args.csv)
    print(f"wrote {args.csv}: auc={auc:.6f} over {dist.num_pairs} pairs")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = getattr(args, "threads", None)
    try:
        if threads is not None:
            if threads < 1:
                raise ValueError(f"--threads must be >= 1, got {threads}")
            with threadpool_limits(limits=threads):
                return args.func(args)
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return 2
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
