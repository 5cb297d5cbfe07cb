import json

import numpy as np
import pytest

from backbonelab import (generate_synthetic, project_simple, score,
                         write_bipartite_edgelist)
from backbonelab.backboning import score_disparity
from backbonelab.cli import main
from backbonelab.graphs import (read_weighted_edgelist, write_weighted_edgelist)


@pytest.fixture(scope="module")
def bipartite_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "bip.tsv"
    g = generate_synthetic(25, 60, left_exponent=1.6, right_exponent=1.6,
                           target_disassortativity=-0.3, seed=4, tolerance=0.2)
    write_bipartite_edgelist(g, path)
    return path, g


@pytest.fixture(scope="module")
def weighted_file(tmp_path_factory, bipartite_file):
    path = tmp_path_factory.mktemp("data") / "weighted.tsv"
    _, g = bipartite_file
    write_weighted_edgelist(project_simple(g, "right"), path)
    return path


class TestExitCodes:
    def test_unknown_method_is_usage_error(self, bipartite_file, capsys):
        path, _ = bipartite_file
        with pytest.raises(SystemExit) as exit_info:
            main(["project", str(path), "--method", "bogus"])
        assert exit_info.value.code == 2

    def test_missing_input_is_data_error(self, tmp_path, capsys):
        rc = main(["project", str(tmp_path / "nope.tsv"), "--method", "simple",
                   "--out-dir", str(tmp_path)])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_nonconvergent_ycn_exits_one_with_residual(self, bipartite_file,
                                                       tmp_path, capsys):
        path, _ = bipartite_file
        rc = main(["project", str(path), "--method", "ycn", "--tol", "1e-15",
                   "--max-iter", "1", "--out-dir", str(tmp_path)])
        assert rc == 1
        assert "residual" in capsys.readouterr().err

    def test_empty_after_blacklist_exits_one(self, tmp_path, capsys):
        f = tmp_path / "tiny.tsv"
        f.write_text("u1\tspam\n")
        rc = main(["ingest-stats", str(f), "--blacklist", "spam",
                   "--out-dir", str(tmp_path)])
        assert rc == 1
        assert "empty graph" in capsys.readouterr().err


class TestProject:
    def test_output_matches_library(self, bipartite_file, tmp_path, capsys):
        path, g = bipartite_file
        rc = main(["project", str(path), "--method", "simple", "--side", "right",
                   "--out-dir", str(tmp_path), "--out", "proj.tsv"])
        assert rc == 0
        got = read_weighted_edgelist(tmp_path / "proj.tsv")
        want = project_simple(g, "right")
        assert got.edge_weights() == pytest.approx(want.edge_weights())
        sidecar = json.loads((tmp_path / "proj.tsv.json").read_text())
        assert sidecar["method"] == "simple"
        assert sidecar["n_edges"] == want.n_edges

    def test_ycn_sidecar_has_diagnostics(self, bipartite_file, tmp_path):
        path, _ = bipartite_file
        rc = main(["project", str(path), "--method", "ycn",
                   "--out-dir", str(tmp_path), "--out", "ycn.tsv"])
        assert rc == 0
        sidecar = json.loads((tmp_path / "ycn.tsv.json").read_text())
        assert sidecar["ycn"]["iterations"] >= 1
        assert sidecar["ycn"]["residual"] <= 1e-10


class TestBackbone:
    def test_fraction_contract(self, weighted_file, tmp_path, capsys):
        rc = main(["backbone", str(weighted_file), "--method", "nc",
                   "--fraction", "0.2", "--out-dir", str(tmp_path)])
        assert rc == 0
        g_in = read_weighted_edgelist(weighted_file)
        kept = read_weighted_edgelist(tmp_path / "backbone.tsv")
        sb = score(g_in, "nc")
        ties = int((sb.scores == np.sort(sb.scores)[::-1][
            max(0, int(np.ceil(0.2 * g_in.n_edges)) - 1)]).sum())
        target = 0.2 * g_in.n_edges
        assert target <= kept.n_edges <= target + ties + 1

    def test_cutoff_keeps_scores_at_or_above(self, weighted_file, tmp_path):
        rc = main(["backbone", str(weighted_file), "--method", "df",
                   "--cutoff", "0.63", "--out-dir", str(tmp_path)])
        assert rc == 0
        g_in = read_weighted_edgelist(weighted_file)
        scores = score_disparity(g_in).score_map()
        kept = read_weighted_edgelist(tmp_path / "backbone.tsv")
        kept_edges = set(kept.edge_weights())
        for pair, s in scores.items():
            assert (s >= 0.63) == (pair in kept_edges)

    def test_cutoff_above_max_warns_and_writes_empty(self, weighted_file,
                                                     tmp_path, capsys):
        rc = main(["backbone", str(weighted_file), "--method", "naive",
                   "--cutoff", "1e12", "--out-dir", str(tmp_path)])
        assert rc == 0
        assert "warning" in capsys.readouterr().err
        assert (tmp_path / "backbone.tsv").read_text() == ""

    def test_requires_cutoff_or_fraction(self, weighted_file, tmp_path):
        with pytest.raises(SystemExit) as exit_info:
            main(["backbone", str(weighted_file), "--method", "nc"])
        assert exit_info.value.code == 2


class TestMetricsCommand:
    def test_reports_topology_json(self, weighted_file, tmp_path, capsys):
        rc = main(["metrics", str(weighted_file), "--seed", "3"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload) == {"node_count", "edge_count", "coverage",
                                "transitivity", "modularity", "centralization"}
        assert 0 <= payload["coverage"] <= 1


class TestSimgenAndStats:
    def test_simgen_deterministic(self, tmp_path, capsys):
        args = ["simgen", "--n-left", "20", "--n-right", "50",
                "--target", "-0.3", "--tolerance", "0.2", "--seed", "13"]
        rc = main(args + ["--out-dir", str(tmp_path / "a")])
        rc2 = main(args + ["--out-dir", str(tmp_path / "b")])
        assert rc == rc2 == 0
        assert (tmp_path / "a" / "bipartite.tsv").read_bytes() == \
               (tmp_path / "b" / "bipartite.tsv").read_bytes()

    def test_ingest_stats_writes_report(self, bipartite_file, tmp_path, capsys):
        path, g = bipartite_file
        rc = main(["ingest-stats", str(path), "--out-dir", str(tmp_path)])
        assert rc == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["n_left"] == g.n_left
        assert summary["n_right"] == g.n_right
        assert summary["n_edges"] == g.n_edges
        out = capsys.readouterr().out
        assert f"edges: {g.n_edges}" in out


class TestPipeline:
    def test_runs_and_manifest(self, bipartite_file, tmp_path):
        path, _ = bipartite_file
        rc = main(["pipeline", "--input", str(path),
                   "--projections", "simple", "--backbonings", "nc",
                   "--fractions", "0.4,0.2,0.1",
                   "--seed", "2", "--out-dir", str(tmp_path / "out")])
        assert rc == 0
        rows = (tmp_path / "out" / "runs.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 3
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert "runs.csv" in manifest["files"]

    def test_synthetic_source_and_determinism(self, tmp_path):
        args = ["pipeline", "--synthetic",
                '{"n_left": 30, "n_right": 80, "left_exponent": 1.6, '
                '"right_exponent": 1.6, "target_disassortativity": -0.3, '
                '"tolerance": 0.25}',
                "--projections", "simple,probs", "--backbonings", "naive,nc",
                "--fractions", "0.3,0.1", "--seed", "6"]
        rc = main(args + ["--out-dir", str(tmp_path / "x")])
        rc2 = main(args + ["--out-dir", str(tmp_path / "y")])
        assert rc == rc2 == 0
        mx = (tmp_path / "x" / "manifest.json").read_bytes()
        my = (tmp_path / "y" / "manifest.json").read_bytes()
        assert mx == my

    def test_requires_exactly_one_source(self, bipartite_file, tmp_path, capsys):
        path, _ = bipartite_file
        rc = main(["pipeline", "--input", str(path), "--synthetic", "{}",
                   "--out-dir", str(tmp_path)])
        assert rc == 1
        assert "exactly one" in capsys.readouterr().err

    def test_config_file_supplies_defaults(self, bipartite_file, tmp_path):
        path, _ = bipartite_file
        cfg = {"input": str(path), "projections": ["hyperbolic"],
               "backbonings": ["df"], "fractions": [0.3, 0.1], "seed": 8}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        rc = main(["pipeline", "--config", str(cfg_path),
                   "--out-dir", str(tmp_path / "out")])
        assert rc == 0
        rows = (tmp_path / "out" / "runs.csv").read_text().strip().splitlines()
        assert len(rows) == 3
        assert rows[1].startswith("hyperbolic,df,1")
