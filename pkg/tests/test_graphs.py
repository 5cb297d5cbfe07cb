import numpy as np
import pytest

from backbonelab import (BipartiteGraph, GraphError, WeightedGraph, degree_report,
                         ingest_bipartite, write_bipartite_edgelist)
from backbonelab.graphs import read_weighted_edgelist, write_weighted_edgelist
from backbonelab.util import spearman

from conftest import random_bipartite


def write_rows(path, rows, delimiter="\t"):
    path.write_text("".join(delimiter.join(r) + "\n" for r in rows), encoding="utf-8")


class TestIngest:
    def test_duplicate_rows_accumulate_multiplicity(self, tmp_path):
        f = tmp_path / "in.tsv"
        write_rows(f, [("u1", "d1"), ("u1", "d1"), ("u1", "d2")])
        g = ingest_bipartite(f)
        assert g.n_left == 1
        assert g.n_right == 2
        assert g.n_edges == 2
        assert g.edge_multiplicities()[("u1", "d1")] == 2

    def test_blacklist_filtering_everything_is_an_error(self, tmp_path):
        f = tmp_path / "in.tsv"
        write_rows(f, [("u1", "twitter.com")])
        with pytest.raises(GraphError, match="empty graph"):
            ingest_bipartite(f, blacklist={"twitter.com"})

    def test_blacklist_drops_node_and_dependents(self, tmp_path):
        f = tmp_path / "in.tsv"
        write_rows(f, [("u1", "spam"), ("u1", "d1"), ("u2", "spam")])
        g = ingest_bipartite(f, blacklist={"spam"})
        # u2 only pointed at the blacklisted domain, so it disappears too
        assert set(g.left_labels) == {"u1"}
        assert set(g.right_labels) == {"d1"}

    def test_blacklist_preserves_surviving_multiplicities(self, rng, tmp_path):
        for trial in range(20):
            g = random_bipartite(rng, 5, 7, 0.5)
            mult = {k: int(rng.integers(1, 6)) for k in g.edge_multiplicities()}
            f = tmp_path / f"m{trial}.tsv"
            write_rows(f, [(l, r, str(c)) for (l, r), c in mult.items()])
            victims = {r for _, r in list(mult)[: rng.integers(0, 3)]}
            survivors = {k: c for k, c in mult.items() if k[1] not in victims}
            if not survivors:
                continue
            filtered = ingest_bipartite(f, blacklist=victims)
            assert filtered.edge_multiplicities() == survivors

    def test_malformed_row_errors_name_the_line(self, tmp_path):
        f = tmp_path / "in.tsv"
        f.write_text("u1\td1\nonly-one-column\n", encoding="utf-8")
        with pytest.raises(GraphError, match="line 2"):
            ingest_bipartite(f)

    def test_bad_count_errors_name_the_line(self, tmp_path):
        f = tmp_path / "in.tsv"
        f.write_text("u1\td1\tnot-a-number\n", encoding="utf-8")
        with pytest.raises(GraphError, match="line 1"):
            ingest_bipartite(f)

    def test_comments_and_blank_lines_are_skipped(self, tmp_path):
        f = tmp_path / "in.tsv"
        f.write_text("# header comment\n\nu1\td1\n", encoding="utf-8")
        g = ingest_bipartite(f)
        assert g.n_edges == 1

    def test_count_column_accumulates(self, tmp_path):
        f = tmp_path / "in.tsv"
        write_rows(f, [("u1", "d1", "3"), ("u1", "d1", "2")])
        g = ingest_bipartite(f)
        assert g.edge_multiplicities()[("u1", "d1")] == 5

    def test_min_multiplicity_filters_rare_edges(self, tmp_path):
        f = tmp_path / "in.tsv"
        write_rows(f, [("u1", "d1", "3"), ("u1", "d2", "1"), ("u2", "d2", "2")])
        g = ingest_bipartite(f, min_multiplicity=2)
        assert set(g.edge_multiplicities()) == {("u1", "d1"), ("u2", "d2")}

    def test_roundtrip_write_then_ingest_is_identity(self, rng, tmp_path):
        for trial in range(25):
            g = random_bipartite(rng, rng.integers(2, 8), rng.integers(2, 8), 0.4)
            f = tmp_path / f"rt{trial}.tsv"
            write_bipartite_edgelist(g, f)
            assert ingest_bipartite(f) == g

    def test_ingest_stats_contract_counts(self, tmp_path):
        # the ingest report must expose exactly these dataset-shape numbers
        f = tmp_path / "in.tsv"
        write_rows(f, [("u1", "d1", "10"), ("u1", "d2", "5"), ("u2", "d1", "7")])
        g = ingest_bipartite(f)
        rep = degree_report(g)
        assert (rep.n_left, rep.n_right, rep.n_edges) == (2, 2, 3)
        assert rep.total_multiplicity == 22


class TestBipartiteGraph:
    def test_sides_must_be_disjoint(self):
        with pytest.raises(GraphError, match="overlap"):
            BipartiteGraph.from_pairs([("x", "x")])

    def test_empty_is_an_error(self):
        with pytest.raises(GraphError, match="empty graph"):
            BipartiteGraph.from_pairs([])

    def test_degrees(self):
        g = BipartiteGraph.from_pairs([("a", "x"), ("a", "y"), ("b", "y")])
        assert dict(zip(g.left_labels, g.degrees_left())) == {"a": 2, "b": 1}
        assert dict(zip(g.right_labels, g.degrees_right())) == {"x": 1, "y": 2}


class TestWeightedGraph:
    def test_rejects_self_loops(self):
        with pytest.raises(GraphError):
            WeightedGraph.from_weights(["a", "b"], {("a", "a"): 1.0})

    def test_rejects_nonpositive_weights(self):
        with pytest.raises(GraphError):
            WeightedGraph.from_weights(["a", "b"], {("a", "b"): 0.0})

    def test_isolates_are_retained(self):
        g = WeightedGraph.from_weights(["a", "b", "c"], {("a", "b"): 1.0})
        assert g.n_nodes == 3
        assert list(g.degrees()) == [1, 1, 0]

    def test_roundtrip_weighted_edgelist(self, rng, tmp_path):
        from conftest import random_weighted
        g = random_weighted(rng, 7, 0.5)
        f = tmp_path / "w.tsv"
        write_weighted_edgelist(g, f)
        back = read_weighted_edgelist(f)
        assert back.labels == tuple(sorted(g.labels))
        for (a, b), w in g.edge_weights().items():
            assert back.edge_weights()[(a, b)] == pytest.approx(w, rel=1e-11)


class TestDegreeReport:
    def test_complete_bipartite_has_undefined_disassortativity(self):
        g = BipartiteGraph.from_pairs(
            [(l, r) for l in ("a", "b") for r in ("x", "y")])
        rep = degree_report(g)
        assert rep.pearson_log_degree is None
        assert rep.spearman_log_degree is None

    def test_star_degrees(self):
        k = 5
        g = BipartiteGraph.from_pairs([(f"u{i}", "hub") for i in range(k)])
        rep = degree_report(g)
        assert rep.right_degrees.max() == k
        assert list(rep.left_degrees) == [1] * k

    def test_histogram_mass_equals_edge_count(self, rng):
        for _ in range(10):
            g = random_bipartite(rng, 7, 9, 0.35)
            rep = degree_report(g)
            assert rep.joint_histogram.sum() == g.n_edges

    def test_correlations_in_unit_interval(self, rng):
        for _ in range(10):
            g = random_bipartite(rng, 8, 8, 0.3)
            rep = degree_report(g)
            for r in (rep.pearson_log_degree, rep.spearman_log_degree):
                if r is not None:
                    assert -1.0 - 1e-12 <= r <= 1.0 + 1e-12

    def test_cumulative_distribution_points(self):
        g = BipartiteGraph.from_pairs(
            [("a", "x"), ("a", "y"), ("a", "z"), ("b", "z")])
        rep = degree_report(g)
        # left degrees: a=3, b=1 -> share >= 1 is 1.0, share >= 3 is 0.5
        assert rep.cumulative_left == [(1, 1.0), (3, 0.5)]

    def test_spearman_equals_pearson_of_ranks(self):
        # full reversal gives exactly -1
        assert spearman(np.array([1, 2, 3]), np.array([3, 2, 1])) == pytest.approx(-1.0)

    def test_spearman_matches_scipy_with_ties(self, rng):
        from scipy import stats
        for _ in range(20):
            x = rng.integers(0, 5, size=12).astype(float)
            y = rng.integers(0, 5, size=12).astype(float)
            ours = spearman(x, y)
            ref = stats.spearmanr(x, y).statistic
            if ours is None:
                assert np.isnan(ref)
            else:
                assert ours == pytest.approx(ref, abs=1e-12)
