import numpy as np
import pytest

from backbonelab import BipartiteGraph, WeightedGraph


def random_bipartite(rng, n_left=6, n_right=6, p=0.4):
    """Random bipartite graph as a BipartiteGraph; guaranteed at least 1 edge."""
    pairs = {}
    for i in range(n_left):
        for j in range(n_right):
            if rng.random() < p:
                pairs[(f"L{i}", f"R{j}")] = 1
    if not pairs:
        pairs[("L0", "R0")] = 1
    return BipartiteGraph.from_pairs(pairs)


def random_weighted(rng, n=8, p=0.4, max_w=10.0):
    """Random weighted graph over n nodes with at least one edge."""
    weights = {}
    names = [f"n{i}" for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                weights[(names[i], names[j])] = float(rng.uniform(0.1, max_w))
    if not weights:
        weights[(names[0], names[1])] = 1.0
    return WeightedGraph.from_weights(names, weights)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
