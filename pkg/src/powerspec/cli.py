"""Command-line interface.

Exit status: 0 success, 1 I/O error, 2 invalid input, 3 eigensolver failure,
4 a stability trial exceeded the W1 Lipschitz bound.
"""
import argparse
import json
import logging
import os
import sys

import numpy as np

from . import analysis, diffusion, graph, signatures, spectral, stability
from .errors import PowerSpecError, SolverFailure, TheoremViolation, ValidationError
from .measures import make_probability_measure

log = logging.getLogger("powerspec")

EXIT_IO, EXIT_VALIDATION, EXIT_SOLVER, EXIT_THEOREM = 1, 2, 3, 4


def _config_line(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return "config: " + json.dumps(cfg, sort_keys=True)


def _positive(kind):
    def parse(s):
        v = kind(s)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {s}")
        return v

    return parse


def _unit_interval(s):
    v = float(s)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {s}")
    return v


def _existing(path):
    if not os.path.exists(path):
        raise FileNotFoundError(f"input file not found: {path}")
    return path


def _writable(path):
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise FileNotFoundError(f"output directory does not exist: {parent}")
    return path


def _add_operator_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="symmetric matrix as CSV (row per line) or JSON {n, data}")
    src.add_argument("--edges", help="edge list 'i j [w]'; the operator is its normalized Laplacian")
    src.add_argument("--cloud", help="point-cloud CSV; the operator is the diffusion-map matrix")
    p.add_argument("--epsilon", type=_positive(float), default=1.0,
                   help="Gaussian kernel bandwidth for --cloud (default 1.0)")
    p.add_argument("--alpha", type=_unit_interval, default=0.5,
                   help="density normalization exponent in [0, 1] for --cloud (default 0.5)")
    p.add_argument("--group-tol", type=_positive(float), default=None,
                   help="eigenvalue grouping tolerance (default 1e-8 * max(1, ||H||_2))")


def _load_operator(args):
    if args.matrix:
        return spectral.read_matrix(_existing(args.matrix))
    if args.edges:
        return graph.normalized_laplacian(graph.read_edge_list(_existing(args.edges)))
    pc = diffusion.read_point_cloud(_existing(args.cloud))
    return diffusion.diffusion_operator(pc, diffusion.DiffusionParams(args.epsilon, args.alpha))


def _decompose(args):
    return spectral.decompose(_load_operator(args), group_tol=args.group_tol)


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True)
        fh.write("\n")


def cmd_gen_torus(args):
    pc = diffusion.sample_torus(args.n, args.R, args.r, args.seed)
    diffusion.write_point_cloud(pc, _writable(args.output), header=_config_line(args))


def cmd_laplacian(args):
    L = graph.normalized_laplacian(graph.read_edge_list(_existing(args.edges)))
    spectral.write_matrix(L, _writable(args.output), header=_config_line(args))


def cmd_diffusion(args):
    pc = diffusion.read_point_cloud(_existing(args.input))
    S = diffusion.diffusion_operator(pc, diffusion.DiffusionParams(args.epsilon, args.alpha))
    spectral.write_matrix(S, _writable(args.output), header=_config_line(args))


def cmd_spectra(args):
    d = _decompose(args)
    out = {"config": _config_line(args), "n": d.n}
    if args.pairs:
        out["pairs"] = [
            {"x": x, "y": y, "spectrum": s.measure.to_records()}
            for (x, y), s in signatures.pair_spectra(d).items()
        ]
    else:
        out["vertices"] = signatures.spectra_to_records(signatures.vertex_spectra(d))
    if args.decomposition:
        out["decomposition"] = d.to_json()
    _write_json(out, _writable(args.output))


def read_spectra_json(path):
    """Load the output of ``spectra``: a list of vertex measures, or a dict of pair measures."""
    with open(path) as fh:
        obj = json.load(fh)

    def measure(records):
        return make_probability_measure([r["atom"] for r in records], [r["mass"] for r in records])

    if "pairs" in obj:
        return obj["n"], {(p["x"], p["y"]): measure(p["spectrum"]) for p in obj["pairs"]}
    return obj["n"], [measure(v["spectrum"]) for v in obj["vertices"]]


def cmd_quantiles(args):
    d = _decompose(args)
    Q = analysis.quantile_matrix(d, args.quantiles)
    analysis.write_csv_matrix(Q.rows, _writable(args.output), header=_config_line(args))


def cmd_distances(args):
    d = _decompose(args)
    D = signatures.signature_distance_matrix(d).dist
    analysis.write_csv_matrix(D, _writable(args.output), header=_config_line(args))


def cmd_reconstruct(args):
    n, pairs = read_spectra_json(_existing(args.input))
    if not isinstance(pairs, dict):
        raise ValidationError("reconstruct needs pair spectra (run 'spectra --pairs')")
    H = signatures.reconstruct_matrix(pairs, n)
    spectral.write_matrix(H, _writable(args.output), header=_config_line(args))
    if args.reference:
        ref = spectral.read_matrix(_existing(args.reference))
        err = float(np.max(np.abs(H - ref)))
        print(f"max abs reconstruction error: {err:.3e}")


def cmd_stability(args):
    dims = (args.dim, args.dim) if args.dim else (args.min_dim, args.max_dim)
    if dims[0] < 1 or dims[0] > dims[1]:
        raise ValidationError(f"bad dimension range {dims}")
    kinds = tuple(args.kinds.split(","))
    for k in kinds:
        if k not in stability.ENSEMBLE_KINDS:
            raise ValidationError(f"unknown trial kind {k!r}; choose from {stability.ENSEMBLE_KINDS}")
    trials = stability.run_ensemble(args.trials, seed=args.seed, dims=dims,
                                    t_range=(args.t_min, args.t_max), kinds=kinds)
    stability.write_trials_csv(trials, _writable(args.output), header=_config_line(args))
    summary = stability.summarize(trials)
    summary["seed"] = args.seed
    if args.summary:
        stability.write_summary_json(summary, _writable(args.summary))
    print(json.dumps(summary, sort_keys=True))
    if summary["violations"]:
        raise TheoremViolation(f"{summary['violations']} trial(s) exceeded the W1 bound")


def cmd_cluster(args):
    if not os.path.isdir(args.output_dir):
        raise FileNotFoundError(f"output directory does not exist: {args.output_dir}")
    pc = diffusion.read_point_cloud(_existing(args.input))
    res = analysis.run_pipeline(
        pc, diffusion.DiffusionParams(args.epsilon, args.alpha), m=args.quantiles,
        pca_k=args.pca_k, dbscan_eps=args.dbscan_eps, min_pts=args.min_pts,
    )
    hdr = _config_line(args)
    out = args.output_dir
    analysis.write_csv_matrix(res.quantiles.rows, os.path.join(out, "quantiles.csv"), header=hdr)
    analysis.write_csv_matrix(res.pca.scores, os.path.join(out, "pca_scores.csv"),
                              columns=[f"pc{i + 1}" for i in range(res.pca.k)], header=hdr)
    analysis.write_csv_matrix(res.clusters.labels, os.path.join(out, "labels.csv"),
                              columns=["label"], header=hdr)
    analysis.write_csv_matrix(res.eigenvalues, os.path.join(out, "eigenvalues.csv"),
                              columns=["eigenvalue"], header=hdr)
    print(json.dumps({"clusters": res.clusters.k, "noise": res.clusters.noise,
                      "dbscan_eps": res.dbscan_eps,
                      "eigenvalues_above_0.01": int(np.sum(res.eigenvalues > 0.01))}, sort_keys=True))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="powerspec",
        description="Power spectrum signatures, Wasserstein comparison and stability trials. "
        "Set SPECTRA_SIG_THREADS to cap worker threads.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-torus", help="sample a torus point cloud uniformly by surface area")
    p.add_argument("--n", type=_positive(int), default=5000, help="number of points (default 5000)")
    p.add_argument("--R", type=_positive(float), default=1.0, help="major radius, axis to tube centre (default 1.0)")
    p.add_argument("--r", type=_positive(float), default=0.25, help="minor (tube) radius (default 0.25)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--output", required=True, help="output point-cloud CSV")
    p.set_defaults(func=cmd_gen_torus)

    p = sub.add_parser("laplacian", help="normalized Laplacian I - D^-1/2 A D^-1/2 of an edge list")
    p.add_argument("--edges", required=True, help="edge list 'i j [w]' (weight defaults to 1)")
    p.add_argument("--output", required=True, help="output matrix (.csv or .json)")
    p.set_defaults(func=cmd_laplacian)

    p = sub.add_parser("diffusion", help="symmetric diffusion-map matrix of a point cloud")
    p.add_argument("--input", required=True, help="point-cloud CSV")
    p.add_argument("--epsilon", type=_positive(float), required=True, help="Gaussian kernel bandwidth")
    p.add_argument("--alpha", type=_unit_interval, default=0.5, help="density normalization exponent (default 0.5)")
    p.add_argument("--output", required=True, help="output matrix (.csv or .json)")
    p.set_defaults(func=cmd_diffusion)

    p = sub.add_parser("spectra", help="power spectra of vertex (or pair) indicators as JSON")
    _add_operator_args(p)
    p.add_argument("--pairs", action="store_true", help="emit spectra of all pair indicators instead")
    p.add_argument("--decomposition", action="store_true", help="include the eigendecomposition for debugging")
    p.add_argument("--output", required=True, help="output JSON")
    p.set_defaults(func=cmd_spectra)

    p = sub.add_parser("quantiles", help="midpoint-grid quantile vectors of every vertex spectrum")
    _add_operator_args(p)
    p.add_argument("--quantiles", type=_positive(int), default=1000, help="quantiles per vertex (default 1000)")
    p.add_argument("--output", required=True, help="output CSV, one row per vertex")
    p.set_defaults(func=cmd_quantiles)

    p = sub.add_parser("distances", help="all-pairs W1 between vertex spectra")
    _add_operator_args(p)
    p.add_argument("--output", required=True, help="output CSV matrix")
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("reconstruct", help="rebuild a matrix from its pair-indicator spectra")
    p.add_argument("--input", required=True, help="JSON written by 'spectra --pairs'")
    p.add_argument("--output", required=True, help="output matrix (.csv or .json)")
    p.add_argument("--reference", help="original matrix; report the max reconstruction error")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("stability", help="randomized W1 <= n ||H - H'||_2 trials")
    p.add_argument("--dim", type=_positive(int), default=None, help="fixed matrix size (overrides the range)")
    p.add_argument("--min-dim", type=_positive(int), default=2, help="smallest matrix size (default 2)")
    p.add_argument("--max-dim", type=_positive(int), default=16, help="largest matrix size (default 16)")
    p.add_argument("--trials", type=_positive(int), default=1000, help="number of trials (default 1000)")
    p.add_argument("--t-min", type=_positive(float), default=1e-6, help="smallest step t (default 1e-6)")
    p.add_argument("--t-max", type=_positive(float), default=1.0, help="largest step t (default 1)")
    p.add_argument("--kinds", default=",".join(stability.ENSEMBLE_KINDS),
                   help="comma-separated base ensembles: goe, degenerate, near_degenerate")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--output", required=True, help="trial log CSV")
    p.add_argument("--summary", help="optional summary JSON (max/mean ratio)")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("cluster", help="diffusion operator -> quantile vectors -> PCA -> DBSCAN")
    p.add_argument("--input", required=True, help="point-cloud CSV")
    p.add_argument("--epsilon", type=_positive(float), required=True, help="Gaussian kernel bandwidth")
    p.add_argument("--alpha", type=_unit_interval, default=0.5, help="density normalization exponent (default 0.5)")
    p.add_argument("--quantiles", type=_positive(int), default=1000, help="quantiles per point (default 1000)")
    p.add_argument("--pca-k", type=_positive(int), default=2, help="principal components kept (default 2)")
    p.add_argument("--dbscan-eps", type=_positive(float), default=None,
                   help="DBSCAN radius (default 5%% of the largest PCA-score distance)")
    p.add_argument("--min-pts", type=_positive(int), default=10, help="DBSCAN core threshold (default 10)")
    p.add_argument("--seed", type=int, default=0, help="recorded in output headers; the pipeline is deterministic")
    p.add_argument("--output-dir", required=True, help="directory for quantiles/pca_scores/labels/eigenvalues CSV")
    p.set_defaults(func=cmd_cluster)
    return parser


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        args.func(args)
    except TheoremViolation as exc:
        print(f"powerspec: bound violated: {exc}", file=sys.stderr)
        return EXIT_THEOREM
    except SolverFailure as exc:
        print(f"powerspec: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValidationError, PowerSpecError, ValueError, KeyError) as exc:
        print(f"powerspec: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"powerspec: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
