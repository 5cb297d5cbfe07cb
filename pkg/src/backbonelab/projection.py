"""Unipartite projections of bipartite graphs: simple, hyperbolic, probs, ycn.

All four techniques connect two same-side nodes iff they share at least one
neighbor on the opposite side; they differ only in how the shared neighbors
are turned into an edge weight:

  simple      w(u,v) = |shared(u,v)|
  hyperbolic  w(u,v) = sum over z in shared(u,v) of 1/deg(z)
  probs       directed w(u->v) = sum over z of 1/(deg(u)*deg(z)),
              symmetrized by averaging the two directions
  ycn         stationary edge flow of the infinite two-step random walk:
              w(u,v) = pi_u*P[u,v] + pi_v*P[v,u], with P the probs-style
              row-stochastic transition matrix (self-transitions included)
              and pi its stationary distribution

Projections ignore edge multiplicities: neighborhoods are sets.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .graphs import BipartiteGraph, GraphError, WeightedGraph

__all__ = [
    "Side",
    "ProjectionMethod",
    "ProjectionSpec",
    "ConvergenceError",
    "project",
    "project_simple",
    "project_hyperbolic",
    "project_probs",
    "project_ycn",
    "project_ycn_detailed",
]


class Side(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class ProjectionMethod(str, enum.Enum):
    SIMPLE = "simple"
    HYPERBOLIC = "hyperbolic"
    PROBS = "probs"
    YCN = "ycn"


@dataclass(frozen=True)
class ProjectionSpec:
    """Which technique, which side, and ycn convergence controls."""

    method: ProjectionMethod
    side: Side = Side.RIGHT
    ycn_tolerance: float = 1e-10
    ycn_max_iterations: int = 200_000

    def __post_init__(self):
        object.__setattr__(self, "method", ProjectionMethod(self.method))
        object.__setattr__(self, "side", Side(self.side))
        if not (self.ycn_tolerance > 0):
            raise ValueError("ycn_tolerance must be > 0")
        if self.ycn_max_iterations < 1:
            raise ValueError("ycn_max_iterations must be >= 1")


class ConvergenceError(RuntimeError):
    """Power iteration failed to converge within the iteration budget."""

    def __init__(self, iterations: int, residual: float, tolerance: float):
        self.iterations = iterations
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"stationary distribution not converged after {iterations} iterations: "
            f"residual {residual:.3e} > tolerance {tolerance:.3e}"
        )


def _oriented_biadjacency(g: BipartiteGraph, side: Side) -> tuple[sparse.csr_matrix, tuple[str, ...]]:
    """Biadjacency with the projected side as rows, plus that side's labels."""
    side = Side(side)
    mat = g.biadjacency()
    if side is Side.LEFT:
        return mat, g.left_labels
    return mat.T.tocsr(), g.right_labels


def _graph_from_sparse(weights: sparse.spmatrix, labels) -> WeightedGraph:
    """Upper triangle of a symmetric weight matrix as a WeightedGraph."""
    coo = sparse.triu(weights, k=1).tocoo()
    order = np.lexsort((coo.col, coo.row))
    eu = coo.row[order].astype(np.int64)
    ev = coo.col[order].astype(np.int64)
    w = coo.data[order].astype(np.float64)
    keep = w > 0
    return WeightedGraph(labels, eu[keep], ev[keep], w[keep], _skip_checks=True)


def project_simple(g: BipartiteGraph, side: Side = Side.RIGHT) -> WeightedGraph:
    """Shared-neighbor counts."""
    b, labels = _oriented_biadjacency(g, side)
    return _graph_from_sparse(b @ b.T, labels)


def project_hyperbolic(g: BipartiteGraph, side: Side = Side.RIGHT) -> WeightedGraph:
    """Shared neighbors discounted by the inverse of their own degree."""
    b, labels = _oriented_biadjacency(g, side)
    inv_deg_other = 1.0 / np.asarray(b.sum(axis=0)).ravel()
    weighted = b.multiply(inv_deg_other[np.newaxis, :]).tocsr() @ b.T
    return _graph_from_sparse(weighted, labels)


def _two_step_transition(b: sparse.csr_matrix) -> sparse.csr_matrix:
    """Row-stochastic two-step walk matrix on the projected side
    (self-transitions kept, which is what makes the rows sum to one)."""
    deg_side = np.asarray(b.sum(axis=1)).ravel()
    deg_other = np.asarray(b.sum(axis=0)).ravel()
    scaled = b.multiply(1.0 / deg_side[:, np.newaxis]).tocsr()
    scaled = scaled.multiply(1.0 / deg_other[np.newaxis, :]).tocsr()
    return (scaled @ b.T).tocsr()


def project_probs(g: BipartiteGraph, side: Side = Side.RIGHT) -> WeightedGraph:
    """Two-step walk probabilities, symmetrized by averaging both directions."""
    b, labels = _oriented_biadjacency(g, side)
    p = _two_step_transition(b)
    return _graph_from_sparse((p + p.T) * 0.5, labels)


def _stationary_distribution(p: sparse.csr_matrix, tolerance: float,
                             max_iterations: int) -> tuple[np.ndarray, int, float]:
    """Power-iterate pi <- pi P from uniform until the geometric tail estimate
    of the remaining error drops below tolerance."""
    n = p.shape[0]
    pt = p.T.tocsr()
    pi = np.full(n, 1.0 / n)
    prev_res = None
    residual = np.inf
    for it in range(1, max_iterations + 1):
        nxt = pt @ pi
        total = nxt.sum()
        if total > 0:
            nxt /= total
        residual = float(np.abs(nxt - pi).sum())
        pi = nxt
        # hit the floating-point noise floor: nothing left to gain
        if residual == 0.0 or residual < 1e-3 * tolerance:
            return pi, it, residual
        if residual < tolerance and prev_res is not None and residual < prev_res:
            ratio = residual / prev_res
            # remaining distance bounded by the geometric series tail
            if residual * ratio / (1.0 - ratio) < tolerance:
                return pi, it, residual
        prev_res = residual
    raise ConvergenceError(max_iterations, residual, tolerance)


def project_ycn_detailed(g: BipartiteGraph, side: Side = Side.RIGHT,
                         spec: ProjectionSpec | None = None) -> tuple[WeightedGraph, dict]:
    """ycn projection plus convergence diagnostics.

    The walk is restricted to the largest connected component of the shared-
    neighbor support graph (which makes it irreducible; the self-transitions
    make it aperiodic). Nodes outside that component get no edges.
    """
    if spec is None:
        spec = ProjectionSpec(method=ProjectionMethod.YCN, side=side)
    b, labels = _oriented_biadjacency(g, side)
    p = _two_step_transition(b)

    support = sparse.triu(p, k=1).tocsr()
    support.eliminate_zeros()
    n_comp, comp = csgraph.connected_components(support, directed=False)
    sizes = np.bincount(comp, minlength=n_comp)
    main = int(np.argmax(sizes))
    nodes = np.flatnonzero(comp == main)

    p_main = p[nodes][:, nodes].tocsr()
    # renormalize rows: mass cannot leave a support component, so this only
    # scrubs floating-point drift
    rows = np.asarray(p_main.sum(axis=1)).ravel()
    p_main = p_main.multiply(1.0 / rows[:, np.newaxis]).tocsr()

    pi, iterations, residual = _stationary_distribution(
        p_main, spec.ycn_tolerance, spec.ycn_max_iterations)

    flow = p_main.multiply(pi[:, np.newaxis])
    local = _graph_from_sparse(flow + flow.T, tuple(str(i) for i in range(len(nodes))))

    eu = nodes[local.edge_u]
    ev = nodes[local.edge_v]
    graph = WeightedGraph(labels, eu, ev, local.weights, _skip_checks=True)
    diagnostics = {
        "iterations": iterations,
        "residual": residual,
        "tolerance": spec.ycn_tolerance,
        "component_size": int(len(nodes)),
        "n_components": int(n_comp),
        "stationary": pi,
        "component_nodes": nodes,
    }
    return graph, diagnostics


def project_ycn(g: BipartiteGraph, side: Side = Side.RIGHT,
                spec: ProjectionSpec | None = None) -> WeightedGraph:
    graph, _ = project_ycn_detailed(g, side, spec)
    return graph


def project(g: BipartiteGraph, spec: ProjectionSpec) -> WeightedGraph:
    """Dispatch on spec.method."""
    method = ProjectionMethod(spec.method)
    if method is ProjectionMethod.SIMPLE:
        return project_simple(g, spec.side)
    if method is ProjectionMethod.HYPERBOLIC:
        return project_hyperbolic(g, spec.side)
    if method is ProjectionMethod.PROBS:
        return project_probs(g, spec.side)
    return project_ycn(g, spec.side, spec)
