"""Edge significance scoring and backbone extraction.

Three scorers re-weight a graph's edges so that a single threshold becomes
meaningful despite skewed weight distributions:

  naive  score = raw weight
  df     per-endpoint uniform null: an endpoint with degree k and strength s
         rates its edge 1 - (1 - w/s)^(k-1); the edge takes the larger of its
         two endpoint scores (degree-1 endpoints rate 0)
  nc     per-edge null from both strengths: expectation s_i*s_j/T with a
         binomial-style variance; the score is the standardized deviation

Thresholds are resolved from target retained-edge fractions so different
scorers return comparable edge counts.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .graphs import GraphError, WeightedGraph
from .util import fmt12

__all__ = [
    "BackboneMethod",
    "ScoredBackbone",
    "ThresholdGrid",
    "score",
    "score_naive",
    "score_disparity",
    "score_noise_corrected",
    "resolve_thresholds",
    "extract",
    "write_scored_edgelist",
]


class BackboneMethod(str, enum.Enum):
    NAIVE = "naive"
    DISPARITY = "df"
    NOISE_CORRECTED = "nc"


@dataclass
class ScoredBackbone:
    """A weighted graph whose edges carry a backboning score (aligned arrays)."""

    base: WeightedGraph
    scores: np.ndarray
    method: BackboneMethod

    def __post_init__(self):
        if len(self.scores) != self.base.n_edges:
            raise GraphError("one score per edge required")

    def score_map(self) -> dict[tuple[str, str], float]:
        labels = self.base.labels
        return {
            (labels[u], labels[v]): float(s)
            for u, v, s in zip(self.base.edge_u, self.base.edge_v, self.scores)
        }


@dataclass(frozen=True)
class ThresholdGrid:
    """Resolved score cutoffs for a decreasing list of retained-edge fractions."""

    fractions: tuple[float, ...]
    cutoffs: tuple[float, ...]
    retained_counts: tuple[int, ...]

    def __post_init__(self):
        for a, b in zip(self.cutoffs, self.cutoffs[1:]):
            if b < a:
                raise ValueError("cutoffs must be nondecreasing as fractions decrease")


# nine retained-edge fractions used throughout; the source study fixes the
# number of levels but not their values
DEFAULT_FRACTIONS = (0.50, 0.35, 0.25, 0.18, 0.12, 0.08, 0.05, 0.03, 0.02)


def score_naive(g: WeightedGraph) -> ScoredBackbone:
    """Scores are the raw weights."""
    if g.n_edges == 0:
        raise GraphError("cannot score an empty graph")
    return ScoredBackbone(g, g.weights.copy(), BackboneMethod.NAIVE)


def score_disparity(g: WeightedGraph) -> ScoredBackbone:
    """Disparity-filter significance, max over the two endpoints, in [0, 1]."""
    if g.n_edges == 0:
        raise GraphError("cannot score an empty graph")
    deg = g.degrees()
    strength = g.strengths()

    def endpoint(nodes):
        k = deg[nodes].astype(np.float64)
        s = strength[nodes]
        p = g.weights / s
        sig = 1.0 - (1.0 - p) ** (k - 1.0)
        sig[deg[nodes] < 2] = 0.0
        return sig

    scores = np.maximum(endpoint(g.edge_u), endpoint(g.edge_v))
    return ScoredBackbone(g, np.clip(scores, 0.0, 1.0), BackboneMethod.DISPARITY)


def score_noise_corrected(g: WeightedGraph) -> ScoredBackbone:
    """Standardized deviation from the strength-product expectation.

    Zero-variance edges degenerate to +/- infinity depending on whether the
    observation beats its expectation.
    """
    if g.n_edges == 0:
        raise GraphError("cannot score an empty graph")
    strength = g.strengths()
    total = g.total_weight()
    s_u = strength[g.edge_u]
    s_v = strength[g.edge_v]
    expectation = s_u * s_v / total
    variance = expectation * (1.0 - s_u / total) * (1.0 - s_v / total)
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = (g.weights - expectation) / np.sqrt(variance)
    degenerate = variance <= 0.0
    if degenerate.any():
        scores[degenerate] = np.where(
            g.weights[degenerate] > expectation[degenerate], np.inf, -np.inf)
    return ScoredBackbone(g, scores, BackboneMethod.NOISE_CORRECTED)


_SCORERS = {
    BackboneMethod.NAIVE: score_naive,
    BackboneMethod.DISPARITY: score_disparity,
    BackboneMethod.NOISE_CORRECTED: score_noise_corrected,
}


def score(g: WeightedGraph, method: BackboneMethod) -> ScoredBackbone:
    return _SCORERS[BackboneMethod(method)](g)


def resolve_thresholds(sb: ScoredBackbone, fractions=DEFAULT_FRACTIONS) -> ThresholdGrid:
    """Cutoffs hitting each target retained-edge fraction, ties kept.

    The cutoff for fraction f is the ceil(f*m)-th largest score; extracting
    at that cutoff retains at least that many edges, plus any ties sitting
    exactly on it.
    """
    fractions = tuple(float(f) for f in fractions)
    for f in fractions:
        if not (0.0 < f <= 1.0):
            raise ValueError(f"fractions must lie in (0, 1], got {f}")
    for a, b in zip(fractions, fractions[1:]):
        if b >= a:
            raise ValueError("fractions must be strictly decreasing")
    m = len(sb.scores)
    ordered = np.sort(sb.scores)[::-1]
    cutoffs, retained = [], []
    for f in fractions:
        k = min(m, max(1, math.ceil(f * m - 1e-9)))
        cut = float(ordered[k - 1])
        cutoffs.append(cut)
        retained.append(int((sb.scores >= cut).sum()))
    return ThresholdGrid(fractions, tuple(cutoffs), tuple(retained))


def extract(sb: ScoredBackbone, cutoff: float) -> WeightedGraph:
    """Subgraph of edges scoring at or above the cutoff.

    Surviving edges keep their original weights; nodes that lose all edges
    stay in the graph as isolates so coverage statistics remain meaningful.
    """
    mask = sb.scores >= cutoff
    return sb.base.subgraph_by_edge_mask(mask)


def write_scored_edgelist(sb: ScoredBackbone, path, *, delimiter: str = "\t") -> None:
    """TSV rows: node_a, node_b, raw_weight, score."""
    g = sb.base
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v, w, s in zip(g.edge_u, g.edge_v, g.weights, sb.scores):
            fh.write(f"{g.labels[u]}{delimiter}{g.labels[v]}{delimiter}"
                     f"{fmt12(w)}{delimiter}{fmt12(s)}\n")
