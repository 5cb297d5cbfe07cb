"""Command-line interface.

Subcommands: ingest-stats, simgen, project, backbone, metrics, pipeline.
Exit codes: 0 success, 1 data or runtime error, 2 usage error. All randomness
flows from --seed; outputs are byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .backboning import (BackboneMethod, DEFAULT_FRACTIONS, extract,
                         resolve_thresholds, score, write_scored_edgelist)
from .graphs import (GraphError, degree_report, ingest_bipartite,
                     read_weighted_edgelist, write_bipartite_edgelist,
                     write_degree_report, write_weighted_edgelist)
from .metrics import UndefinedMetricError, topology_report
from .projection import (ConvergenceError, ProjectionMethod, ProjectionSpec,
                         Side, project, project_ycn_detailed)
from .strategylab import GridCellError, GridConfig, run_grid, write_grid_outputs
from .synthetic import (DEFAULT_LEFT_EXPONENT, DEFAULT_RIGHT_EXPONENT,
                        generate_synthetic)
from .util import fmt12

PROJECTION_CHOICES = [m.value for m in ProjectionMethod]
BACKBONE_CHOICES = [m.value for m in BackboneMethod]


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=0, help="root seed for all randomness")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker threads for grid metrics (default: cpu count)")
    parser.add_argument("--out-dir", type=Path, default=Path("."),
                        help="directory for output files")
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON config file; explicit flags win over it")


def _add_ingest_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--delimiter", default="\t")
    parser.add_argument("--blacklist", default="",
                        help="comma-separated right-node ids to drop")
    parser.add_argument("--min-multiplicity", type=int, default=1)


def _ingest(args) -> "BipartiteGraph":
    blacklist = {b for b in args.blacklist.split(",") if b}
    return ingest_bipartite(args.input, delimiter=args.delimiter,
                            blacklist=blacklist,
                            min_multiplicity=args.min_multiplicity)


def cmd_ingest_stats(args) -> int:
    g = _ingest(args)
    report = degree_report(g)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    files = write_degree_report(report, g, args.out_dir)
    print(f"nodes: {report.n_left} left, {report.n_right} right; "
          f"edges: {report.n_edges}; multiplicity total: {report.total_multiplicity}")
    pea = "undefined" if report.pearson_log_degree is None else fmt12(report.pearson_log_degree)
    spe = "undefined" if report.spearman_log_degree is None else fmt12(report.spearman_log_degree)
    print(f"log-degree correlation: pearson {pea}, spearman {spe}")
    print(f"wrote {len(files)} files to {args.out_dir}")
    return 0


def cmd_simgen(args) -> int:
    g = generate_synthetic(
        n_left=args.n_left, n_right=args.n_right,
        left_exponent=args.left_exponent, right_exponent=args.right_exponent,
        target_disassortativity=args.target, seed=args.seed,
        tolerance=args.tolerance)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / args.out
    write_bipartite_edgelist(g, out)
    report = degree_report(g)
    print(f"wrote {out}: {g.n_left}x{g.n_right} nodes, {g.n_edges} edges, "
          f"log-degree pearson {fmt12(report.pearson_log_degree)}")
    return 0


def cmd_project(args) -> int:
    g = _ingest(args)
    side = Side(args.side)
    spec = ProjectionSpec(method=ProjectionMethod(args.method), side=side,
                          ycn_tolerance=args.tol, ycn_max_iterations=args.max_iter)
    diagnostics = None
    if spec.method is ProjectionMethod.YCN:
        projected, diag = project_ycn_detailed(g, side, spec)
        diagnostics = {k: diag[k] for k in ("iterations", "residual", "tolerance",
                                            "component_size", "n_components")}
    else:
        projected = project(g, spec)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / args.out
    write_weighted_edgelist(projected, out)
    sidecar = {
        "method": spec.method.value,
        "side": side.value,
        "n_nodes": projected.n_nodes,
        "n_edges": projected.n_edges,
        "ycn": diagnostics,
    }
    (args.out_dir / (args.out + ".json")).write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {out}: {projected.n_nodes} nodes, {projected.n_edges} edges")
    return 0


def cmd_backbone(args) -> int:
    g = read_weighted_edgelist(args.input, delimiter=args.delimiter)
    sb = score(g, BackboneMethod(args.method))
    if args.fraction is not None:
        grid = resolve_thresholds(sb, (args.fraction,))
        cutoff = grid.cutoffs[0]
    else:
        cutoff = args.cutoff
    backbone = extract(sb, cutoff)
    if backbone.n_edges == 0:
        print("warning: cutoff above the maximum score, backbone is empty",
              file=sys.stderr)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / args.out
    write_weighted_edgelist(backbone, out)
    write_scored_edgelist(sb, args.out_dir / (args.out + ".scores"))
    info = {
        "method": sb.method.value,
        "cutoff": cutoff,
        "fraction": args.fraction,
        "input_edges": g.n_edges,
        "retained_edges": backbone.n_edges,
    }
    (args.out_dir / (args.out + ".json")).write_text(
        json.dumps(info, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {out}: kept {backbone.n_edges} of {g.n_edges} edges "
          f"at cutoff {fmt12(cutoff)}")
    return 0


def cmd_metrics(args) -> int:
    g = read_weighted_edgelist(args.input, delimiter=args.delimiter)
    report = topology_report(g, seed=args.seed)
    payload = {
        "node_count": report.node_count,
        "edge_count": report.edge_count,
        "coverage": report.coverage,
        "transitivity": report.transitivity,
        "modularity": report.modularity,
        "centralization": report.centralization,
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        (args.out_dir / args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def _load_config_file(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise GraphError(f"config {path} must hold a JSON object")
    return data


def cmd_pipeline(args) -> int:
    cfg = _load_config_file(args.config)

    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        return cfg.get(key, default)

    input_path = pick(args.input, "input", None)
    synthetic = cfg.get("synthetic")
    if args.synthetic is not None:
        synthetic = json.loads(args.synthetic)
    if (input_path is None) == (synthetic is None):
        raise GraphError("exactly one of --input or --synthetic is required")

    seed = pick(args.seed, "seed", 0)
    projections = pick(args.projections, "projections", list(PROJECTION_CHOICES))
    backbonings = pick(args.backbonings, "backbonings", list(BACKBONE_CHOICES))
    fractions = pick(args.fractions, "fractions", list(DEFAULT_FRACTIONS))
    side = pick(args.side, "side", Side.RIGHT.value)
    workers = pick(args.workers, "workers", None)
    if workers is None:
        import os
        workers = max(1, os.cpu_count() or 1)

    if isinstance(projections, str):
        projections = [p for p in projections.split(",") if p]
    if isinstance(backbonings, str):
        backbonings = [b for b in backbonings.split(",") if b]
    if isinstance(fractions, str):
        fractions = [float(f) for f in fractions.split(",") if f]

    if synthetic is not None:
        params = dict(synthetic)
        g = generate_synthetic(
            n_left=int(params.get("n_left", 400)),
            n_right=int(params.get("n_right", 2000)),
            left_exponent=float(params.get("left_exponent", DEFAULT_LEFT_EXPONENT)),
            right_exponent=float(params.get("right_exponent", DEFAULT_RIGHT_EXPONENT)),
            target_disassortativity=float(params.get("target_disassortativity", -0.33)),
            seed=int(params.get("seed", seed)),
            tolerance=float(params.get("tolerance", 0.05)),
        )
    else:
        blacklist = cfg.get("blacklist", [])
        if args.blacklist:
            blacklist = [b for b in args.blacklist.split(",") if b]
        g = ingest_bipartite(input_path, delimiter=args.delimiter,
                             blacklist=set(blacklist),
                             min_multiplicity=args.min_multiplicity)

    config = GridConfig(
        projections=tuple(projections),
        backbonings=tuple(backbonings),
        fractions=tuple(float(f) for f in fractions),
        side=str(side),
        seed=int(seed),
        ycn_tolerance=float(pick(args.tol, "ycn_tolerance", 1e-10)),
        ycn_max_iterations=int(pick(args.max_iter, "ycn_max_iterations", 200_000)),
        workers=int(workers),
    )
    result = run_grid(g, config)
    manifest = write_grid_outputs(result, args.out_dir,
                                  bipartite=g if synthetic is not None else None)
    print(f"wrote {len(manifest['files'])} files to {args.out_dir} "
          f"({len(result.runs)} runs)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="backbonelab",
        description="Bipartite projection, backbone extraction, and "
                    "projection/backboning strategy comparison.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-stats", help="degree statistics of a bipartite edge list")
    p.add_argument("input", type=Path)
    _add_ingest_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_ingest_stats)

    p = sub.add_parser("simgen", help="generate a synthetic disassortative bipartite graph")
    p.add_argument("--n-left", type=int, required=True)
    p.add_argument("--n-right", type=int, required=True)
    p.add_argument("--left-exponent", type=float, default=DEFAULT_LEFT_EXPONENT)
    p.add_argument("--right-exponent", type=float, default=DEFAULT_RIGHT_EXPONENT)
    p.add_argument("--target", type=float, default=-0.33,
                   help="target logged-degree correlation")
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--out", default="bipartite.tsv")
    _add_common(p)
    p.set_defaults(func=cmd_simgen)

    p = sub.add_parser("project", help="project a bipartite graph to one side")
    p.add_argument("input", type=Path)
    p.add_argument("--method", choices=PROJECTION_CHOICES, required=True)
    p.add_argument("--side", choices=[s.value for s in Side], default=Side.RIGHT.value)
    p.add_argument("--tol", type=float, default=1e-10, help="ycn convergence tolerance")
    p.add_argument("--max-iter", type=int, default=200_000, help="ycn iteration cap")
    p.add_argument("--out", default="projection.tsv")
    _add_ingest_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("backbone", help="score edges and extract a backbone")
    p.add_argument("input", type=Path, help="weighted edge list TSV")
    p.add_argument("--method", choices=BACKBONE_CHOICES, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--cutoff", type=float, help="keep edges scoring >= cutoff")
    group.add_argument("--fraction", type=float, help="target retained-edge fraction")
    p.add_argument("--delimiter", default="\t")
    p.add_argument("--out", default="backbone.tsv")
    _add_common(p)
    p.set_defaults(func=cmd_backbone)

    p = sub.add_parser("metrics", help="topology report of a weighted edge list")
    p.add_argument("input", type=Path)
    p.add_argument("--delimiter", default="\t")
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("pipeline", help="run the full strategy grid")
    p.add_argument("--input", type=Path, default=None, help="bipartite edge list")
    p.add_argument("--synthetic", default=None,
                   help='synthetic generator params as JSON, e.g. \'{"n_left":400,"n_right":2000}\'')
    p.add_argument("--projections", default=None, help="comma-separated subset")
    p.add_argument("--backbonings", default=None, help="comma-separated subset")
    p.add_argument("--fractions", default=None, help="comma-separated decreasing fractions")
    p.add_argument("--side", choices=[s.value for s in Side], default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    _add_ingest_flags(p)
    _add_common(p)
    # config-file values may supply the seed, so its flag default must be None
    p.set_defaults(func=cmd_pipeline, seed=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, UndefinedMetricError, ConvergenceError,
            GridCellError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
