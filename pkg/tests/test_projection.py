"""Projection tests against independent dense-matrix oracles."""

import numpy as np
import pytest

from backbonelab import (BipartiteGraph, ConvergenceError, ProjectionSpec,
                         project_hyperbolic, project_probs, project_simple,
                         project_ycn)
from backbonelab.projection import ProjectionMethod, Side, project_ycn_detailed

from conftest import random_bipartite


# -- oracles -----------------------------------------------------------------

def biadjacency_dense(g, side):
    """Dense 0/1 matrix with the projected side as rows (pure numpy)."""
    m = np.zeros((g.n_left, g.n_right))
    m[g.edge_left, g.edge_right] = 1.0
    return m if side == "left" else m.T


def oracle_simple(g, side):
    b = biadjacency_dense(g, side)
    return b @ b.T


def oracle_hyperbolic(g, side):
    b = biadjacency_dense(g, side)
    return b @ np.diag(1.0 / b.sum(axis=0)) @ b.T


def oracle_probs_directed(g, side):
    """Row-normalized two-step transition matrix, self-pairs included."""
    b = biadjacency_dense(g, side)
    return np.diag(1.0 / b.sum(axis=1)) @ b @ np.diag(1.0 / b.sum(axis=0)) @ b.T


def oracle_stationary(p):
    """Dominant left eigenvector of a stochastic matrix via dense eig."""
    vals, vecs = np.linalg.eig(p.T)
    idx = int(np.argmin(np.abs(vals - 1.0)))
    pi = np.real(vecs[:, idx])
    return pi / pi.sum()


def weights_matrix(wg):
    m = np.zeros((wg.n_nodes, wg.n_nodes))
    m[wg.edge_u, wg.edge_v] = wg.weights
    m[wg.edge_v, wg.edge_u] = wg.weights
    return m


TOY = BipartiteGraph.from_pairs([("a", "x"), ("a", "y"), ("b", "y"), ("b", "z")])


class TestSimple:
    def test_toy_shared_neighbor_count(self):
        assert project_simple(TOY, "left").edge_weights() == {("a", "b"): 1.0}

    def test_identical_neighborhoods_of_size_three(self):
        g = BipartiteGraph.from_pairs(
            [("a", r) for r in "xyz"] + [("b", r) for r in "xyz"])
        assert project_simple(g, "left").edge_weights() == {("a", "b"): 3.0}

    def test_matches_dense_oracle(self, rng):
        for _ in range(40):
            g = random_bipartite(rng, rng.integers(2, 13), rng.integers(2, 13), 0.35)
            for side in ("left", "right"):
                got = weights_matrix(project_simple(g, side))
                want = oracle_simple(g, side)
                np.fill_diagonal(want, 0.0)
                assert np.allclose(got, want, rtol=1e-10, atol=0)

    def test_weights_are_positive_integers(self, rng):
        g = random_bipartite(rng, 10, 10, 0.4)
        w = project_simple(g, "right").weights
        assert np.array_equal(w, np.round(w))
        assert (w >= 1).all()


class TestHyperbolic:
    def test_single_shared_neighbor_of_degree_two(self):
        assert project_hyperbolic(TOY, "left").edge_weights() == {("a", "b"): 0.5}

    def test_degree_three_and_eight_contrast(self):
        # two nodes share one neighbor of degree 3 and one of degree 8
        pairs = [("a", "z3"), ("b", "z3"), ("c1", "z3"),
                 ("a", "z8"), ("b", "z8")]
        pairs += [(f"c{i}", "z8") for i in range(1, 7)]
        g = BipartiteGraph.from_pairs(pairs)
        w = project_hyperbolic(g, "left").edge_weights()[("a", "b")]
        assert w == pytest.approx(1 / 3 + 1 / 8, rel=1e-12)

    def test_matches_dense_oracle(self, rng):
        for _ in range(40):
            g = random_bipartite(rng, rng.integers(2, 13), rng.integers(2, 13), 0.35)
            got = weights_matrix(project_hyperbolic(g, "right"))
            want = oracle_hyperbolic(g, "right")
            np.fill_diagonal(want, 0.0)
            assert np.allclose(got, want, rtol=1e-10, atol=1e-14)

    def test_equal_shared_degrees_reduce_to_scaled_simple(self):
        # every shared neighbor has degree exactly 2: hyperbolic = simple / 2
        pairs = []
        for i in range(5):
            pairs += [(f"u{i}", f"r{i}"), (f"u{(i + 1) % 5}", f"r{i}")]
        g = BipartiteGraph.from_pairs(pairs)
        simple = project_simple(g, "left").edge_weights()
        hyper = project_hyperbolic(g, "left").edge_weights()
        assert set(simple) == set(hyper)
        for k in simple:
            assert hyper[k] == pytest.approx(simple[k] / 2, rel=1e-12)

    def test_never_exceeds_simple(self, rng):
        for _ in range(20):
            g = random_bipartite(rng, 9, 9, 0.4)
            simple = project_simple(g, "right").edge_weights()
            hyper = project_hyperbolic(g, "right").edge_weights()
            assert all(hyper[k] <= simple[k] + 1e-12 for k in simple)


class TestProbs:
    def test_toy_symmetrized_value(self):
        assert project_probs(TOY, "left").edge_weights()[("a", "b")] == pytest.approx(0.25)

    def test_equal_degrees_make_averaging_a_noop(self, rng):
        for _ in range(20):
            g = random_bipartite(rng, 8, 8, 0.4)
            p = oracle_probs_directed(g, "right")
            deg = biadjacency_dense(g, "right").sum(axis=1)
            for u in range(p.shape[0]):
                for v in range(p.shape[0]):
                    if u != v and deg[u] == deg[v]:
                        assert p[u, v] == pytest.approx(p[v, u], rel=1e-10)

    def test_matches_dense_oracle(self, rng):
        for _ in range(40):
            g = random_bipartite(rng, rng.integers(2, 13), rng.integers(2, 13), 0.35)
            got = weights_matrix(project_probs(g, "left"))
            p = oracle_probs_directed(g, "left")
            want = 0.5 * (p + p.T)
            np.fill_diagonal(want, 0.0)
            assert np.allclose(got, want, rtol=1e-10, atol=1e-14)


class TestYcn:
    def test_two_node_side_uniform_stationary(self):
        _, diag = project_ycn_detailed(TOY, "left")
        assert diag["stationary"] == pytest.approx([0.5, 0.5])

    def test_stationary_is_a_distribution(self, rng):
        for _ in range(20):
            g = random_bipartite(rng, 9, 9, 0.35)
            _, diag = project_ycn_detailed(g, "right")
            pi = diag["stationary"]
            assert pi.sum() == pytest.approx(1.0, abs=1e-12)
            assert (pi >= 0).all()

    def test_stationary_matches_dense_eigenvector(self, rng):
        tol = 1e-12
        for _ in range(40):
            g = random_bipartite(rng, rng.integers(2, 13), rng.integers(2, 13), 0.4)
            spec = ProjectionSpec(method=ProjectionMethod.YCN, side=Side.RIGHT,
                                  ycn_tolerance=tol, ycn_max_iterations=500_000)
            _, diag = project_ycn_detailed(g, "right", spec)
            pi = diag["stationary"]
            nodes = diag["component_nodes"]
            p = oracle_probs_directed(g, "right")[np.ix_(nodes, nodes)]
            p /= p.sum(axis=1, keepdims=True)
            want = oracle_stationary(p)
            assert np.abs(pi - want).max() < 10 * tol

    def test_weight_mass_bounded_by_one(self, rng):
        for _ in range(20):
            g = random_bipartite(rng, 8, 10, 0.35)
            wg = project_ycn(g, "right")
            assert wg.weights.sum() <= 1.0 + 1e-12

    def test_nonconvergence_reports_residual(self):
        g = random_bipartite(np.random.default_rng(3), 10, 10, 0.4)
        spec = ProjectionSpec(method=ProjectionMethod.YCN, side=Side.RIGHT,
                              ycn_tolerance=1e-15, ycn_max_iterations=1)
        with pytest.raises(ConvergenceError) as err:
            project_ycn(g, "right", spec)
        assert err.value.residual > 0
        assert "residual" in str(err.value)


class TestSharedStructure:
    def test_all_methods_share_the_support(self, rng):
        for _ in range(25):
            g = random_bipartite(rng, rng.integers(2, 10), rng.integers(2, 10), 0.4)
            keys = {}
            for name, fn in (("simple", project_simple),
                             ("hyperbolic", project_hyperbolic),
                             ("probs", project_probs)):
                wg = fn(g, "right")
                keys[name] = set(map(tuple, zip(wg.edge_u, wg.edge_v)))
            assert keys["simple"] == keys["hyperbolic"] == keys["probs"]
            # ycn agrees within its main component
            wy = project_ycn(g, "right")
            ycn_keys = set(map(tuple, zip(wy.edge_u, wy.edge_v)))
            assert ycn_keys <= keys["simple"]

    def test_relabeling_preserves_weights(self, rng):
        g = random_bipartite(rng, 7, 7, 0.45)
        mapping = {lab: f"z{i:02d}" for i, lab in
                   enumerate(reversed(g.right_labels))}
        flipped = BipartiteGraph.from_pairs(
            {(l, mapping[r]): 1 for (l, r) in
             ((g.left_labels[i], g.right_labels[j])
              for i, j in zip(g.edge_left, g.edge_right))})
        for fn in (project_simple, project_hyperbolic, project_probs):
            original = fn(g, "right").edge_weights()
            renamed = fn(flipped, "right").edge_weights()
            for (a, b), w in original.items():
                x, y = sorted((mapping[a], mapping[b]))
                assert renamed[(x, y)] == pytest.approx(w, rel=1e-12)
