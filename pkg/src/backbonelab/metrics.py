"""Topology measurements on backbones and pairwise network similarity.

All metrics treat their input graphs as unweighted: a backbone either kept
an edge or it did not. The modularity machinery accepts weights because the
strategy comparison also clusters similarity matrices, which are weighted
complete graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import brandes_betweenness, common_neighbor_sum, louvain_sweeps
from .graphs import GraphError, WeightedGraph
from .util import average_ranks, pearson, rng_for

__all__ = [
    "UndefinedMetricError",
    "TopologyReport",
    "coverage",
    "transitivity",
    "neighbor_jaccard",
    "cc_similarity",
    "degree_correlation",
    "betweenness_centrality",
    "centralization",
    "modularity_value",
    "modularity_partition",
    "louvain_communities",
    "topology_report",
]


class UndefinedMetricError(ValueError):
    """The metric has no defined value on this input (e.g. zero variance)."""


@dataclass(frozen=True)
class TopologyReport:
    """Per-backbone topology summary; None marks metrics skipped by config."""

    node_count: int
    edge_count: int
    coverage: float
    transitivity: float | None
    modularity: float | None
    centralization: float | None


def coverage(g: WeightedGraph) -> float:
    """Share of nodes with at least one edge."""
    if g.n_nodes == 0:
        raise GraphError("coverage undefined on an empty node set")
    return float((g.degrees() > 0).sum() / g.n_nodes)


def transitivity(g: WeightedGraph) -> float:
    """Global clustering coefficient: 3 * triangles / connected triples."""
    deg = g.degrees().astype(np.int64)
    triads = int((deg * (deg - 1) // 2).sum())
    if triads == 0:
        return 0.0
    indptr, indices = g.csr_adjacency()
    closed = int(common_neighbor_sum(indptr, indices, g.edge_u, g.edge_v))
    return closed / triads


def _check_same_universe(g1: WeightedGraph, g2: WeightedGraph):
    if g1.labels != g2.labels:
        raise GraphError("graphs must share one node universe")


def neighbor_jaccard(g1: WeightedGraph, g2: WeightedGraph) -> float:
    """Mean per-node Jaccard overlap of the two neighborhoods.

    Nodes isolated in both graphs are excluded from the mean (the overlap is
    0/0 there); nodes isolated in exactly one contribute 0.
    """
    _check_same_universe(g1, g2)
    common = np.intersect1d(g1.edge_keys(), g2.edge_keys(), assume_unique=True)
    n = g1.n_nodes
    inter = np.bincount(common // n, minlength=n) + np.bincount(common % n, minlength=n)
    union = g1.degrees() + g2.degrees() - inter
    defined = union > 0
    if not defined.any():
        raise UndefinedMetricError("undefined similarity: no node has any neighbor")
    return float((inter[defined] / union[defined]).mean())


def cc_similarity(g1: WeightedGraph, g2: WeightedGraph) -> float:
    """1 - |transitivity difference|, so high means similar."""
    return 1.0 - cc_distance(g1, g2)


def cc_distance(g1: WeightedGraph, g2: WeightedGraph) -> float:
    return abs(transitivity(g1) - transitivity(g2))


def degree_correlation(g1: WeightedGraph, g2: WeightedGraph) -> float:
    """Spearman correlation of the two degree vectors (isolates count as 0)."""
    _check_same_universe(g1, g2)
    if g1.n_nodes < 3:
        raise UndefinedMetricError("undefined correlation: need at least 3 nodes")
    r = pearson(average_ranks(g1.degrees()), average_ranks(g2.degrees()))
    if r is None:
        raise UndefinedMetricError("undefined correlation: constant degree vector")
    return r


def betweenness_centrality(g: WeightedGraph, normalized: bool = True) -> np.ndarray:
    """Shortest-path betweenness (unweighted, unordered pairs).

    Disconnected graphs are fine: only realizable pairs count. Normalization
    divides by (n-1)(n-2)/2, the count of pairs a node of a connected graph
    could possibly intermediate.
    """
    n = g.n_nodes
    indptr, indices = g.csr_adjacency()
    bc = brandes_betweenness(indptr, indices, n)
    if normalized:
        if n < 3:
            return np.zeros(n)
        bc = bc / ((n - 1) * (n - 2) / 2.0)
    return bc


def centralization(g: WeightedGraph) -> float:
    """Freeman centralization over betweenness: how star-like the graph is.

    1 for the star, 0 for any graph whose nodes all have equal betweenness.
    """
    n = g.n_nodes
    if n < 3:
        raise UndefinedMetricError("centralization undefined for fewer than 3 nodes")
    c = betweenness_centrality(g, normalized=True)
    return float((c.max() * n - c.sum()) / (n - 1))


# ---------------------------------------------------------------------------
# modularity
# ---------------------------------------------------------------------------

def modularity_value(n_nodes: int, edge_u: np.ndarray, edge_v: np.ndarray,
                     weights: np.ndarray, communities: np.ndarray) -> float:
    """Q = sum over communities of (intra-edge fraction - endpoint fraction^2)."""
    total = float(weights.sum())
    if total <= 0:
        raise GraphError("modularity needs at least one edge")
    intra = np.bincount(
        communities[edge_u], weights=np.where(communities[edge_u] == communities[edge_v], weights, 0.0),
        minlength=int(communities.max()) + 1,
    )
    strength = np.bincount(edge_u, weights=weights, minlength=n_nodes)
    strength += np.bincount(edge_v, weights=weights, minlength=n_nodes)
    sigma = np.bincount(communities, weights=strength, minlength=int(communities.max()) + 1)
    e_c = intra / total
    a_c = sigma / (2.0 * total)
    return float((e_c - a_c * a_c).sum())


def _aggregate(edge_u, edge_v, weights, comm):
    """Condense communities into supernodes, merging parallel edges.

    Intra-community weight becomes a self-loop (u == v is legal here)."""
    labels, comm_dense = np.unique(comm, return_inverse=True)
    n = len(labels)
    cu = comm_dense[edge_u]
    cv = comm_dense[edge_v]
    lo = np.minimum(cu, cv)
    hi = np.maximum(cu, cv)
    keys = lo * n + hi
    uniq, inv = np.unique(keys, return_inverse=True)
    w = np.bincount(inv, weights=weights)
    return comm_dense, n, uniq // n, uniq % n, w


def _csr_with_loops(n, edge_u, edge_v, weights):
    """Symmetric CSR over possibly-loopy weighted edges; loops stored once."""
    loops = edge_u == edge_v
    src = np.concatenate([edge_u, edge_v[~loops]])
    dst = np.concatenate([edge_v, edge_u[~loops]])
    dat = np.concatenate([weights, weights[~loops]])
    order = np.lexsort((dst, src))
    src, dst, dat = src[order], dst[order], dat[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    strength = np.bincount(src, weights=dat, minlength=n)
    strength += np.bincount(edge_u[loops], weights=weights[loops], minlength=n)
    return indptr, dst.astype(np.int64), dat, strength


def louvain_communities(n_nodes: int, edge_u: np.ndarray, edge_v: np.ndarray,
                        weights: np.ndarray, seed: int,
                        max_sweeps: int = 200) -> tuple[np.ndarray, float]:
    """Greedy multi-level modularity maximization with seeded node order.

    Returns (community id per node, Q of that partition on the input graph).
    Deterministic for a fixed seed. Never returns a partition worse than
    putting everything in one community (Q = 0).
    """
    total = float(weights.sum())
    if total <= 0 or len(edge_u) == 0:
        raise GraphError("community detection needs at least one edge")
    rng = rng_for(seed, 9)

    mapping = np.arange(n_nodes, dtype=np.int64)
    eu = edge_u.astype(np.int64)
    ev = edge_v.astype(np.int64)
    w = weights.astype(np.float64)
    n = n_nodes

    while True:
        indptr, indices, data, strength = _csr_with_loops(n, eu, ev, w)
        comm = np.arange(n, dtype=np.int64)
        sigma_tot = strength.copy()
        order = rng.permutation(n).astype(np.int64)
        moves = louvain_sweeps(indptr, indices, data, order, comm, sigma_tot,
                               strength, total, max_sweeps)
        comm_dense, n_next, eu, ev, w = _aggregate(eu, ev, w, comm)
        mapping = comm_dense[mapping]
        if moves == 0 or n_next == n:
            break
        n = n_next

    # canonical community ids: numbered by first appearance over node index
    _, canonical = np.unique(mapping, return_inverse=True)
    first_seen = {}
    relabel = np.empty(canonical.max() + 1, dtype=np.int64)
    next_id = 0
    for c in canonical:
        if c not in first_seen:
            first_seen[c] = next_id
            next_id += 1
    for c, i in first_seen.items():
        relabel[c] = i
    communities = relabel[canonical]

    q = modularity_value(n_nodes, edge_u, edge_v, weights, communities)
    if q < 0.0:
        # the trivial all-in-one partition is always worth Q = 0
        return np.zeros(n_nodes, dtype=np.int64), 0.0
    return communities, q


def modularity_partition(g: WeightedGraph, seed: int = 0) -> tuple[dict[str, int], float]:
    """Community partition of a backbone (treated unweighted) and its Q."""
    if g.n_edges == 0:
        raise GraphError("community detection needs at least one edge")
    ones = np.ones(g.n_edges, dtype=np.float64)
    communities, q = louvain_communities(g.n_nodes, g.edge_u, g.edge_v, ones, seed)
    return {lab: int(c) for lab, c in zip(g.labels, communities)}, q


def topology_report(g: WeightedGraph, seed: int = 0,
                    with_transitivity: bool = True,
                    with_modularity: bool = True,
                    with_centralization: bool = True) -> TopologyReport:
    """Bundle of the per-backbone metrics used by the strategy grid."""
    cc = transitivity(g) if with_transitivity else None
    q = None
    if with_modularity:
        q = modularity_partition(g, seed)[1] if g.n_edges else 0.0
    cent = None
    if with_centralization:
        cent = centralization(g) if g.n_nodes >= 3 else None
    return TopologyReport(
        node_count=g.n_nodes,
        edge_count=g.n_edges,
        coverage=coverage(g),
        transitivity=cc,
        modularity=q,
        centralization=cent,
    )
