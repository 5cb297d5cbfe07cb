"""The strategy grid: every projection x backboning x threshold combination.

Runs the full factorial design (4 projections x 3 backbonings x 9 threshold
levels by default), measures each backbone's topology, compares all runs
pairwise under three similarity metrics, and clusters the strategies by those
similarities. All outputs are plot-ready CSV/JSON with deterministic bytes.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import backboning, metrics, projection
from .backboning import BackboneMethod, DEFAULT_FRACTIONS, ScoredBackbone
from .graphs import BipartiteGraph, GraphError, WeightedGraph, write_bipartite_edgelist
from .metrics import TopologyReport, UndefinedMetricError
from .projection import ProjectionMethod, ProjectionSpec, Side
from .util import average_ranks, fmt12, sha256_file

__all__ = [
    "GridConfig",
    "GridCellError",
    "StrategyRun",
    "GridResult",
    "ScoreHistogram",
    "SimilarityMatrix",
    "StrategyClustering",
    "run_grid",
    "similarity_matrices",
    "cluster_strategies",
    "centralization_grid",
    "write_grid_outputs",
]

SIMILARITY_METRICS = ("jaccard", "clustering_coeff", "degree_corr")


@dataclass(frozen=True)
class GridConfig:
    """What to run and how; everything deterministic given the seed."""

    projections: tuple[str, ...] = tuple(m.value for m in ProjectionMethod)
    backbonings: tuple[str, ...] = tuple(m.value for m in BackboneMethod)
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    side: str = Side.RIGHT.value
    seed: int = 0
    ycn_tolerance: float = 1e-10
    ycn_max_iterations: int = 200_000
    workers: int = 1
    with_modularity: bool = True
    with_centralization: bool = True
    histogram_bins: int = 40

    def as_dict(self) -> dict:
        return {
            "projections": list(self.projections),
            "backbonings": list(self.backbonings),
            "fractions": list(self.fractions),
            "side": str(self.side),
            "seed": self.seed,
            "ycn_tolerance": self.ycn_tolerance,
            "ycn_max_iterations": self.ycn_max_iterations,
            "workers": self.workers,
            "with_modularity": self.with_modularity,
            "with_centralization": self.with_centralization,
            "histogram_bins": self.histogram_bins,
        }


class GridCellError(RuntimeError):
    """A grid cell failed; carries the cell identity plus the original error."""

    def __init__(self, cell: str, cause: Exception):
        self.cell = cell
        self.cause = cause
        super().__init__(f"grid cell {cell} failed: {cause}")


@dataclass(frozen=True)
class ScoreHistogram:
    """Log-binned histogram of one strategy's edge scores.

    Scores that cannot live on a log axis are counted separately: finite
    non-positive values plus the two infinite sentinels."""

    strategy: str
    bin_edges: np.ndarray
    counts: np.ndarray
    n_nonpositive: int
    n_neg_infinite: int
    n_pos_infinite: int


@dataclass(frozen=True)
class StrategyRun:
    """One grid cell: a backbone and its topology report."""

    projection: str
    backboning: str
    level: int                      # 1-based threshold level
    fraction: float
    cutoff: float
    backbone: WeightedGraph
    report: TopologyReport
    histogram: ScoreHistogram

    @property
    def strategy(self) -> str:
        return f"{self.projection}+{self.backboning}"

    @property
    def label(self) -> str:
        return f"{self.projection}+{self.backboning}@{self.level}"


@dataclass
class GridResult:
    runs: list[StrategyRun]
    node_labels: tuple[str, ...]
    config: GridConfig
    ycn_diagnostics: dict | None = None


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric run-by-run similarity; NaN marks undefined entries."""

    metric: str
    labels: tuple[str, ...]
    values: np.ndarray


@dataclass(frozen=True)
class StrategyClustering:
    metric: str
    clusters: tuple[frozenset[str], ...]
    modularity: float


def _score_histogram(strategy: str, scores: np.ndarray, bins: int) -> ScoreHistogram:
    finite = scores[np.isfinite(scores)]
    positive = finite[finite > 0]
    n_nonpos = int(len(finite) - len(positive))
    n_neg_inf = int(np.sum(scores == -np.inf))
    n_pos_inf = int(np.sum(scores == np.inf))
    if len(positive) == 0:
        edges = np.empty(0)
        counts = np.empty(0, dtype=np.int64)
    else:
        lo, hi = float(positive.min()), float(positive.max())
        if lo == hi:
            edges = np.array([lo, hi])
            counts = np.array([len(positive)], dtype=np.int64)
        else:
            edges = np.geomspace(lo, hi, bins + 1)
            edges[-1] = hi  # guard the top edge against rounding drift
            counts, _ = np.histogram(positive, bins=edges)
    return ScoreHistogram(strategy, edges, counts, n_nonpos, n_neg_inf, n_pos_inf)


def run_grid(g: BipartiteGraph, config: GridConfig = GridConfig()) -> GridResult:
    """Project, score, threshold, and measure every configured combination.

    Cells run in canonical (projection, backboning, level) order; topology
    reports may be computed by a thread pool without affecting the output.
    Any cell failure aborts the grid naming the failed cell.
    """
    if not config.projections or not config.backbonings or not config.fractions:
        raise GraphError("config needs at least one projection, backboning, and fraction")
    node_labels: tuple[str, ...] | None = None
    ycn_diag = None
    cells: list[tuple[str, str, int, float, float, ScoredBackbone, ScoreHistogram]] = []

    for proj_name in config.projections:
        proj = ProjectionMethod(proj_name)
        try:
            if proj is ProjectionMethod.YCN:
                spec = ProjectionSpec(method=proj, side=Side(config.side),
                                      ycn_tolerance=config.ycn_tolerance,
                                      ycn_max_iterations=config.ycn_max_iterations)
                projected, diag = projection.project_ycn_detailed(g, Side(config.side), spec)
                ycn_diag = {k: diag[k] for k in ("iterations", "residual", "tolerance",
                                                 "component_size", "n_components")}
            else:
                projected = projection.project(
                    g, ProjectionSpec(method=proj, side=Side(config.side)))
        except Exception as exc:
            raise GridCellError(f"{proj.value} projection", exc) from exc
        if node_labels is None:
            node_labels = projected.labels
        for bb_name in config.backbonings:
            bb = BackboneMethod(bb_name)
            cell_name = f"{proj.value}+{bb.value}"
            try:
                sb = backboning.score(projected, bb)
                grid = backboning.resolve_thresholds(sb, config.fractions)
                hist = _score_histogram(cell_name, sb.scores, config.histogram_bins)
            except Exception as exc:
                raise GridCellError(cell_name, exc) from exc
            for level, (fraction, cutoff) in enumerate(
                    zip(grid.fractions, grid.cutoffs), start=1):
                cells.append((proj.value, bb.value, level, fraction, cutoff, sb, hist))

    def build_run(cell) -> StrategyRun:
        proj_name, bb_name, level, fraction, cutoff, sb, hist = cell
        label = f"{proj_name}+{bb_name}@{level}"
        try:
            backbone = backboning.extract(sb, cutoff)
            report = metrics.topology_report(
                backbone, seed=config.seed,
                with_modularity=config.with_modularity,
                with_centralization=config.with_centralization)
        except Exception as exc:
            raise GridCellError(label, exc) from exc
        return StrategyRun(proj_name, bb_name, level, fraction, cutoff,
                           backbone, report, hist)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            runs = list(pool.map(build_run, cells))
    else:
        runs = [build_run(c) for c in cells]
    return GridResult(runs=runs, node_labels=node_labels, config=config,
                      ycn_diagnostics=ycn_diag)


# ---------------------------------------------------------------------------
# pairwise similarity and clustering
# ---------------------------------------------------------------------------

def similarity_matrices(runs: list[StrategyRun]) -> dict[str, SimilarityMatrix]:
    """The three run-by-run similarity matrices (Jaccard, 1-|dCC|, Spearman).

    Undefined entries (degenerate degree vectors, emptied neighborhoods) are
    recorded as NaN, not errors; downstream clustering skips them.
    """
    if len(runs) < 2:
        raise GraphError("need at least two runs to compare")
    labels = tuple(r.label for r in runs)
    universe = runs[0].backbone.labels
    for r in runs:
        if r.backbone.labels != universe:
            raise GraphError("runs do not share a node universe")
    k = len(runs)

    jac = np.full((k, k), np.nan)
    ccs = np.full((k, k), np.nan)
    dcr = np.full((k, k), np.nan)

    transitivities = np.array([
        r.report.transitivity if r.report.transitivity is not None
        else metrics.transitivity(r.backbone)
        for r in runs
    ])
    # centered average-rank degree vectors; constant vectors are undefined
    rank_rows = np.empty((k, len(universe)))
    defined_rank = np.zeros(k, dtype=bool)
    for i, r in enumerate(runs):
        ranks = average_ranks(r.backbone.degrees())
        centered = ranks - ranks.mean()
        norm = float(np.sqrt(np.dot(centered, centered)))
        if norm > 0 and len(universe) >= 3:
            rank_rows[i] = centered / norm
            defined_rank[i] = True

    for i in range(k):
        ccs[i, i] = 1.0
        if defined_rank[i]:
            dcr[i, i] = 1.0
        jac[i, i] = 1.0 if runs[i].backbone.n_edges > 0 else np.nan
        for j in range(i + 1, k):
            cc_val = 1.0 - abs(transitivities[i] - transitivities[j])
            ccs[i, j] = ccs[j, i] = cc_val
            if defined_rank[i] and defined_rank[j]:
                val = float(np.dot(rank_rows[i], rank_rows[j]))
                dcr[i, j] = dcr[j, i] = val
            try:
                val = metrics.neighbor_jaccard(runs[i].backbone, runs[j].backbone)
            except UndefinedMetricError:
                val = np.nan
            jac[i, j] = jac[j, i] = val

    return {
        "jaccard": SimilarityMatrix("jaccard", labels, jac),
        "clustering_coeff": SimilarityMatrix("clustering_coeff", labels, ccs),
        "degree_corr": SimilarityMatrix("degree_corr", labels, dcr),
    }


def cluster_strategies(matrix: SimilarityMatrix, seed: int = 0) -> StrategyClustering:
    """Community structure of the runs under one similarity metric.

    The matrix is read as a weighted complete graph; undefined entries and
    non-positive similarities contribute no edge. Runs left without edges end
    up as singleton clusters, so the clusters always partition all runs.
    """
    k = len(matrix.labels)
    vals = matrix.values
    defined_rows = int(np.sum(np.any(np.isfinite(vals), axis=1)))
    if defined_rows < 2:
        raise GraphError("similarity matrix has fewer than 2 defined rows")
    iu, ju = np.triu_indices(k, k=1)
    w = vals[iu, ju]
    keep = np.isfinite(w) & (w > 0)
    if not keep.any():
        raise GraphError("similarity matrix has no positive entries to cluster")
    communities, q = metrics.louvain_communities(
        k, iu[keep].astype(np.int64), ju[keep].astype(np.int64),
        w[keep].astype(np.float64), seed)
    clusters: dict[int, set[str]] = {}
    for label, c in zip(matrix.labels, communities):
        clusters.setdefault(int(c), set()).add(label)
    ordered = tuple(frozenset(clusters[c]) for c in sorted(clusters))
    return StrategyClustering(matrix.metric, ordered, q)


def centralization_grid(runs: list[StrategyRun]) -> list[dict]:
    """Long-format rows (one per run) of the centralization heatmap."""
    rows = []
    for r in runs:
        rows.append({
            "projection": r.projection,
            "backboning": r.backboning,
            "level": r.level,
            "fraction": r.fraction,
            "cutoff": r.cutoff,
            "centralization": r.report.centralization,
        })
    return rows


# ---------------------------------------------------------------------------
# file outputs
# ---------------------------------------------------------------------------

def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, float) and math.isnan(value):
        return ""
    return fmt12(value)


def write_grid_outputs(result: GridResult, outdir, *,
                       bipartite: BipartiteGraph | None = None,
                       cluster_seed: int | None = None) -> dict:
    """Write runs.csv, per-strategy histograms, similarity matrices, strategy
    clusters, the centralization grid, the node index, and a hash manifest.

    Returns the manifest dict (also written as manifest.json)."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files: list[str] = []
    seed = result.config.seed if cluster_seed is None else cluster_seed

    _write_csv(
        outdir / "runs.csv",
        ["projection", "backboning", "level", "fraction", "cutoff",
         "edge_count", "node_count", "coverage", "transitivity",
         "modularity", "centralization"],
        ([r.projection, r.backboning, str(r.level), fmt12(r.fraction),
          fmt12(r.cutoff), str(r.report.edge_count), str(r.report.node_count),
          _cell(r.report.coverage), _cell(r.report.transitivity),
          _cell(r.report.modularity), _cell(r.report.centralization)]
         for r in result.runs),
    )
    files.append("runs.csv")

    seen = set()
    for r in result.runs:
        if r.strategy in seen:
            continue
        seen.add(r.strategy)
        h = r.histogram
        name = f"hist_{r.projection}_{r.backboning}.csv"
        rows = [["log_bin", fmt12(lo), fmt12(hi), str(int(c))]
                for lo, hi, c in zip(h.bin_edges[:-1], h.bin_edges[1:], h.counts)]
        rows.append(["nonpositive", "", "", str(h.n_nonpositive)])
        rows.append(["neg_infinite", "", "", str(h.n_neg_infinite)])
        rows.append(["pos_infinite", "", "", str(h.n_pos_infinite)])
        _write_csv(outdir / name, ["kind", "lo", "hi", "count"], rows)
        files.append(name)

    sims = similarity_matrices(result.runs)
    for metric_name, sim in sims.items():
        name = f"sim_{metric_name}.csv"
        header = ["run"] + list(sim.labels)
        rows = ([sim.labels[i]] + [_cell(v) for v in sim.values[i]]
                for i in range(len(sim.labels)))
        _write_csv(outdir / name, header, rows)
        files.append(name)

    # the raw clustering-coefficient distance alongside its similarity form
    cc = sims["clustering_coeff"]
    name = "dist_clustering_coeff.csv"
    rows = ([cc.labels[i]] + [_cell(1.0 - v) if math.isfinite(v) else ""
                              for v in cc.values[i]]
            for i in range(len(cc.labels)))
    _write_csv(outdir / name, ["run"] + list(cc.labels), rows)
    files.append(name)

    for metric_name, sim in sims.items():
        clustering = cluster_strategies(sim, seed)
        name = f"clusters_{metric_name}.json"
        payload = {
            "metric": metric_name,
            "modularity": float(clustering.modularity),
            "clusters": [sorted(c) for c in clustering.clusters],
        }
        (outdir / name).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        files.append(name)

    _write_csv(
        outdir / "centralization.csv",
        ["projection", "backboning", "level", "fraction", "cutoff", "centralization"],
        ([row["projection"], row["backboning"], str(row["level"]),
          fmt12(row["fraction"]), fmt12(row["cutoff"]), _cell(row["centralization"])]
         for row in centralization_grid(result.runs)),
    )
    files.append("centralization.csv")

    _write_csv(outdir / "nodes.csv", ["index", "label"],
               ([str(i), lab] for i, lab in enumerate(result.node_labels)))
    files.append("nodes.csv")

    if bipartite is not None:
        write_bipartite_edgelist(bipartite, outdir / "bipartite.tsv")
        files.append("bipartite.tsv")

    manifest = {
        "config": result.config.as_dict(),
        "ycn": result.ycn_diagnostics,
        "files": {name: sha256_file(outdir / name) for name in sorted(files)},
    }
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest
