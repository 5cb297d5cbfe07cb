"""Graph containers, edge-list ingestion, and degree statistics.

Node identifiers are opaque strings. Internally every graph maps its labels
to dense integer indices (labels sorted lexicographically, so the mapping is
a pure function of the node set); all heavy lifting happens on numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse

from .util import fmt12, pearson, spearman

__all__ = [
    "GraphError",
    "BipartiteGraph",
    "WeightedGraph",
    "DegreeReport",
    "ingest_bipartite",
    "degree_report",
    "write_degree_report",
    "write_bipartite_edgelist",
    "write_weighted_edgelist",
    "read_weighted_edgelist",
]


class GraphError(ValueError):
    """Structurally invalid graph or unusable input data."""


def _index_labels(labels: Iterable[str]) -> tuple[tuple[str, ...], dict[str, int]]:
    ordered = tuple(sorted(set(labels)))
    return ordered, {lab: i for i, lab in enumerate(ordered)}


class BipartiteGraph:
    """Two-mode graph: edges run only between the left and the right node set.

    Parallel input edges are collapsed; their repetition count is kept as a
    per-edge multiplicity. Multiplicity is reported by the degree statistics
    but deliberately ignored by the projections, which work on neighbor sets.
    Instances are immutable once built.
    """

    __slots__ = ("left_labels", "right_labels", "edge_left", "edge_right",
                 "multiplicity", "_adj_cache")

    def __init__(self, left_labels, right_labels, edge_left, edge_right, multiplicity):
        self.left_labels: tuple[str, ...] = tuple(left_labels)
        self.right_labels: tuple[str, ...] = tuple(right_labels)
        self.edge_left = np.asarray(edge_left, dtype=np.int64)
        self.edge_right = np.asarray(edge_right, dtype=np.int64)
        self.multiplicity = np.asarray(multiplicity, dtype=np.int64)
        self._adj_cache: dict = {}
        self._validate()

    def _validate(self):
        overlap = set(self.left_labels) & set(self.right_labels)
        if overlap:
            raise GraphError(f"left and right node sets overlap: {sorted(overlap)[:5]}")
        m = len(self.edge_left)
        if len(self.edge_right) != m or len(self.multiplicity) != m:
            raise GraphError("edge arrays have inconsistent lengths")
        if m == 0:
            raise GraphError("empty graph")
        if self.edge_left.min() < 0 or self.edge_left.max() >= len(self.left_labels):
            raise GraphError("edge endpoint outside the left node set")
        if self.edge_right.min() < 0 or self.edge_right.max() >= len(self.right_labels):
            raise GraphError("edge endpoint outside the right node set")
        if (self.multiplicity < 1).any():
            raise GraphError("edge multiplicities must be positive")
        keys = self.edge_left * len(self.right_labels) + self.edge_right
        if len(np.unique(keys)) != m:
            raise GraphError("duplicate edges (multiplicity must be pre-accumulated)")

    @classmethod
    def from_pairs(cls, pairs: Mapping[tuple[str, str], int] | Iterable[tuple[str, str]]) -> "BipartiteGraph":
        """Build from (left_id, right_id) -> multiplicity, or an iterable of pairs."""
        if not isinstance(pairs, Mapping):
            acc: dict[tuple[str, str], int] = {}
            for l, r in pairs:
                acc[(l, r)] = acc.get((l, r), 0) + 1
            pairs = acc
        if not pairs:
            raise GraphError("empty graph")
        left_labels, lidx = _index_labels(l for l, _ in pairs)
        right_labels, ridx = _index_labels(r for _, r in pairs)
        el = np.fromiter((lidx[l] for l, _ in pairs), dtype=np.int64, count=len(pairs))
        er = np.fromiter((ridx[r] for _, r in pairs), dtype=np.int64, count=len(pairs))
        mult = np.fromiter(pairs.values(), dtype=np.int64, count=len(pairs))
        order = np.lexsort((er, el))
        return cls(left_labels, right_labels, el[order], er[order], mult[order])

    # -- basic shape ---------------------------------------------------------

    @property
    def n_left(self) -> int:
        return len(self.left_labels)

    @property
    def n_right(self) -> int:
        return len(self.right_labels)

    @property
    def n_edges(self) -> int:
        return len(self.edge_left)

    @property
    def total_multiplicity(self) -> int:
        return int(self.multiplicity.sum())

    def degrees_left(self) -> np.ndarray:
        return np.bincount(self.edge_left, minlength=self.n_left)

    def degrees_right(self) -> np.ndarray:
        return np.bincount(self.edge_right, minlength=self.n_right)

    def biadjacency(self) -> sparse.csr_matrix:
        """0/1 left-by-right incidence matrix (multiplicity ignored)."""
        if "biadj" not in self._adj_cache:
            data = np.ones(self.n_edges, dtype=np.float64)
            mat = sparse.csr_matrix(
                (data, (self.edge_left, self.edge_right)),
                shape=(self.n_left, self.n_right),
            )
            mat.sort_indices()
            self._adj_cache["biadj"] = mat
        return self._adj_cache["biadj"]

    def edge_multiplicities(self) -> dict[tuple[str, str], int]:
        return {
            (self.left_labels[l], self.right_labels[r]): int(c)
            for l, r, c in zip(self.edge_left, self.edge_right, self.multiplicity)
        }

    def __eq__(self, other):
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (
            self.left_labels == other.left_labels
            and self.right_labels == other.right_labels
            and np.array_equal(self.edge_left, other.edge_left)
            and np.array_equal(self.edge_right, other.edge_right)
            and np.array_equal(self.multiplicity, other.multiplicity)
        )

    def __hash__(self):  # identity hashing; value equality via __eq__ only
        return id(self)

    def __repr__(self):
        return (f"BipartiteGraph(n_left={self.n_left}, n_right={self.n_right}, "
                f"n_edges={self.n_edges})")


class WeightedGraph:
    """Undirected unipartite graph with strictly positive real edge weights.

    Edges are stored once with endpoint indices u < v; zero-weight pairs are
    simply absent. Isolated nodes are legal and intentionally retained (node
    coverage statistics need them).
    """

    __slots__ = ("labels", "edge_u", "edge_v", "weights", "_cache")

    def __init__(self, labels, edge_u, edge_v, weights, _skip_checks=False):
        self.labels: tuple[str, ...] = tuple(labels)
        self.edge_u = np.asarray(edge_u, dtype=np.int64)
        self.edge_v = np.asarray(edge_v, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=np.float64)
        self._cache: dict = {}
        if not _skip_checks:
            self._validate()

    def _validate(self):
        m = len(self.edge_u)
        if len(self.edge_v) != m or len(self.weights) != m:
            raise GraphError("edge arrays have inconsistent lengths")
        if m:
            if self.edge_u.min() < 0 or max(self.edge_u.max(), self.edge_v.max()) >= len(self.labels):
                raise GraphError("edge endpoint outside the node set")
            if (self.edge_u >= self.edge_v).any():
                raise GraphError("edges must have u < v (no self-loops)")
            if not (self.weights > 0).all() or not np.isfinite(self.weights).all():
                raise GraphError("edge weights must be finite and strictly positive")
            keys = self.edge_u * len(self.labels) + self.edge_v
            if len(np.unique(keys)) != m:
                raise GraphError("duplicate edges")

    @classmethod
    def from_weights(cls, labels: Sequence[str], weights: Mapping[tuple[str, str], float]) -> "WeightedGraph":
        ordered, idx = _index_labels(labels)
        eu, ev, w = [], [], []
        for (a, b), wt in weights.items():
            if a not in idx or b not in idx:
                raise GraphError(f"edge endpoint {a!r}/{b!r} not in node set")
            i, j = idx[a], idx[b]
            if i == j:
                raise GraphError(f"self-loop at {a!r}")
            eu.append(min(i, j))
            ev.append(max(i, j))
            w.append(float(wt))
        eu = np.asarray(eu, dtype=np.int64)
        ev = np.asarray(ev, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        order = np.lexsort((ev, eu))
        return cls(ordered, eu[order], ev[order], w[order])

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    def total_weight(self) -> float:
        return float(self.weights.sum())

    def degrees(self) -> np.ndarray:
        if "deg" not in self._cache:
            deg = np.bincount(self.edge_u, minlength=self.n_nodes)
            deg += np.bincount(self.edge_v, minlength=self.n_nodes)
            self._cache["deg"] = deg
        return self._cache["deg"]

    def strengths(self) -> np.ndarray:
        if "strength" not in self._cache:
            s = np.bincount(self.edge_u, weights=self.weights, minlength=self.n_nodes)
            s += np.bincount(self.edge_v, weights=self.weights, minlength=self.n_nodes)
            self._cache["strength"] = s
        return self._cache["strength"]

    def csr_adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) of the symmetric unweighted adjacency, indices sorted.

        Indices are int32: the hot metric kernels are memory-bound."""
        if "csr" not in self._cache:
            n = self.n_nodes
            src = np.concatenate([self.edge_u, self.edge_v])
            dst = np.concatenate([self.edge_v, self.edge_u])
            order = np.lexsort((dst, src))
            src, dst = src[order], dst[order]
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
            self._cache["csr"] = (indptr, dst.astype(np.int32))
        return self._cache["csr"]

    def edge_keys(self) -> np.ndarray:
        """Sorted int64 keys u * n + v, one per edge; used for fast set algebra."""
        if "keys" not in self._cache:
            keys = self.edge_u * self.n_nodes + self.edge_v
            keys.sort()
            self._cache["keys"] = keys
        return self._cache["keys"]

    def edge_weights(self) -> dict[tuple[str, str], float]:
        return {
            (self.labels[u], self.labels[v]): float(w)
            for u, v, w in zip(self.edge_u, self.edge_v, self.weights)
        }

    def subgraph_by_edge_mask(self, mask: np.ndarray) -> "WeightedGraph":
        """Same node set, edges restricted to mask (isolates retained)."""
        return WeightedGraph(self.labels, self.edge_u[mask], self.edge_v[mask],
                             self.weights[mask], _skip_checks=True)

    def relabeled(self, mapping: Mapping[str, str]) -> "WeightedGraph":
        new_labels = [mapping[lab] for lab in self.labels]
        return WeightedGraph.from_weights(
            new_labels,
            {(mapping[self.labels[u]], mapping[self.labels[v]]): w
             for u, v, w in zip(self.edge_u, self.edge_v, self.weights)},
        )

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.labels == other.labels
            and np.array_equal(self.edge_u, other.edge_u)
            and np.array_equal(self.edge_v, other.edge_v)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return f"WeightedGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------

def ingest_bipartite(path, *, delimiter: str = "\t",
                     blacklist: Iterable[str] = (),
                     min_multiplicity: int = 1) -> BipartiteGraph:
    """Read a bipartite edge list: left_id, right_id[, count] per line.

    Lines starting with '#' and blank lines are skipped. Duplicate rows
    accumulate multiplicity. Right nodes in `blacklist` are removed, edges
    below `min_multiplicity` dropped, and nodes left without edges disappear
    with them.

    Raises GraphError naming the line number on malformed rows, and
    GraphError("empty graph") when nothing survives filtering.
    """
    blacklist = frozenset(blacklist)
    counts: dict[tuple[str, str], int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split(delimiter)
            if len(parts) < 2:
                raise GraphError(f"line {lineno}: expected at least 2 columns, got {len(parts)}")
            left, right = parts[0].strip(), parts[1].strip()
            if not left or not right:
                raise GraphError(f"line {lineno}: empty node identifier")
            count = 1
            if len(parts) >= 3 and parts[2].strip():
                try:
                    count = int(parts[2].strip())
                except ValueError:
                    raise GraphError(f"line {lineno}: bad count {parts[2].strip()!r}") from None
                if count < 1:
                    raise GraphError(f"line {lineno}: count must be positive, got {count}")
            if right in blacklist:
                continue
            key = (left, right)
            counts[key] = counts.get(key, 0) + count
    if min_multiplicity > 1:
        counts = {k: c for k, c in counts.items() if c >= min_multiplicity}
    if not counts:
        raise GraphError("empty graph")
    return BipartiteGraph.from_pairs(counts)


def write_bipartite_edgelist(g: BipartiteGraph, path, *, delimiter: str = "\t") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for l, r, c in zip(g.edge_left, g.edge_right, g.multiplicity):
            fh.write(f"{g.left_labels[l]}{delimiter}{g.right_labels[r]}{delimiter}{int(c)}\n")


def write_weighted_edgelist(g: WeightedGraph, path, *, delimiter: str = "\t") -> None:
    """Weighted edge list TSV: node_a, node_b, weight (12 significant digits)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v, w in zip(g.edge_u, g.edge_v, g.weights):
            fh.write(f"{g.labels[u]}{delimiter}{g.labels[v]}{delimiter}{fmt12(w)}\n")


def read_weighted_edgelist(path, *, delimiter: str = "\t") -> WeightedGraph:
    weights: dict[tuple[str, str], float] = {}
    nodes: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split(delimiter)
            if len(parts) < 3:
                raise GraphError(f"line {lineno}: expected 3 columns, got {len(parts)}")
            a, b = parts[0].strip(), parts[1].strip()
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphError(f"line {lineno}: bad weight {parts[2]!r}") from None
            if a == b:
                raise GraphError(f"line {lineno}: self-loop at {a!r}")
            if w <= 0 or not math.isfinite(w):
                raise GraphError(f"line {lineno}: weight must be finite and positive")
            key = (a, b) if a < b else (b, a)
            if key in weights:
                raise GraphError(f"line {lineno}: duplicate edge {key}")
            weights[key] = w
            nodes.update(key)
    if not weights:
        raise GraphError("empty graph")
    return WeightedGraph.from_weights(sorted(nodes), weights)


# ---------------------------------------------------------------------------
# degree statistics
# ---------------------------------------------------------------------------

@dataclass
class DegreeReport:
    """Degree statistics of a bipartite graph (Table-I-style counts included).

    Disassortativity is the correlation between the natural-log degrees of the
    two endpoints over the edge list; None when one side has constant degree.
    """

    n_left: int
    n_right: int
    n_edges: int
    total_multiplicity: int
    left_degrees: np.ndarray
    right_degrees: np.ndarray
    cumulative_left: list[tuple[int, float]]   # (degree, share of nodes with >= degree)
    cumulative_right: list[tuple[int, float]]
    joint_left_bin_edges: np.ndarray            # powers of two; bin i = [2^i, 2^(i+1))
    joint_right_bin_edges: np.ndarray
    joint_histogram: np.ndarray                 # edge counts, left bins x right bins
    pearson_log_degree: float | None
    spearman_log_degree: float | None


def _cumulative_points(degrees: np.ndarray) -> list[tuple[int, float]]:
    n = len(degrees)
    values, counts = np.unique(degrees, return_counts=True)
    # survival function at each realized degree, largest degree last
    tail = np.cumsum(counts[::-1])[::-1]
    return [(int(d), float(t) / n) for d, t in zip(values, tail)]


def degree_report(g: BipartiteGraph) -> DegreeReport:
    """Degree vectors, cumulative distributions, joint log-binned histogram,
    and logged-degree disassortativity of the edge list."""
    dl = g.degrees_left()
    dr = g.degrees_right()
    x = np.log(dl[g.edge_left].astype(np.float64))
    y = np.log(dr[g.edge_right].astype(np.float64))

    bl = np.floor(np.log2(dl[g.edge_left].astype(np.float64))).astype(np.int64)
    br = np.floor(np.log2(dr[g.edge_right].astype(np.float64))).astype(np.int64)
    nbl = int(bl.max()) + 1
    nbr = int(br.max()) + 1
    hist = np.bincount(bl * nbr + br, minlength=nbl * nbr).reshape(nbl, nbr)

    return DegreeReport(
        n_left=g.n_left,
        n_right=g.n_right,
        n_edges=g.n_edges,
        total_multiplicity=g.total_multiplicity,
        left_degrees=dl,
        right_degrees=dr,
        cumulative_left=_cumulative_points(dl),
        cumulative_right=_cumulative_points(dr),
        joint_left_bin_edges=2 ** np.arange(nbl + 1, dtype=np.int64),
        joint_right_bin_edges=2 ** np.arange(nbr + 1, dtype=np.int64),
        joint_histogram=hist,
        pearson_log_degree=pearson(x, y),
        spearman_log_degree=spearman(x, y),
    )


def write_degree_report(report: DegreeReport, g: BipartiteGraph, outdir) -> list[str]:
    """Emit the report as CSV tables plus a JSON summary; returns file names."""
    import json
    from pathlib import Path

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = []

    def csv(name, header, rows):
        with open(outdir / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(row) + "\n")
        files.append(name)

    csv("degrees_left.csv", ["node", "degree"],
        ([lab, str(int(d))] for lab, d in zip(g.left_labels, report.left_degrees)))
    csv("degrees_right.csv", ["node", "degree"],
        ([lab, str(int(d))] for lab, d in zip(g.right_labels, report.right_degrees)))
    csv("cumulative_left.csv", ["degree", "share_at_least"],
        ([str(d), fmt12(s)] for d, s in report.cumulative_left))
    csv("cumulative_right.csv", ["degree", "share_at_least"],
        ([str(d), fmt12(s)] for d, s in report.cumulative_right))
    csv("joint_degree_histogram.csv",
        ["left_bin_lo", "left_bin_hi", "right_bin_lo", "right_bin_hi", "edge_count"],
        ([str(int(report.joint_left_bin_edges[i])), str(int(report.joint_left_bin_edges[i + 1])),
          str(int(report.joint_right_bin_edges[j])), str(int(report.joint_right_bin_edges[j + 1])),
          str(int(report.joint_histogram[i, j]))]
         for i in range(report.joint_histogram.shape[0])
         for j in range(report.joint_histogram.shape[1])))

    summary = {
        "n_left": report.n_left,
        "n_right": report.n_right,
        "n_edges": report.n_edges,
        "total_multiplicity": report.total_multiplicity,
        "left_degree_mean": float(report.left_degrees.mean()),
        "left_degree_max": int(report.left_degrees.max()),
        "right_degree_mean": float(report.right_degrees.mean()),
        "right_degree_max": int(report.right_degrees.max()),
        "pearson_log_degree": report.pearson_log_degree,
        "spearman_log_degree": report.spearman_log_degree,
    }
    (outdir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    files.append("summary.json")
    return files
