import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from toporeg import io
from toporeg.cli import main
from toporeg.embeddings import LinearProjectionModel
from toporeg.optimizer import OptimizerConfig, run

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def cli(*argv):
    return main([str(a) for a in argv])


def failure(capsys, *argv):
    with pytest.raises(SystemExit) as info:
        cli(*argv)
    err = capsys.readouterr().err
    assert err.count("\n") == 1
    return info.value.code, json.loads(err)


def test_persistence_on_equilateral_triangle(tmp_path):
    io.write_points(tmp_path / "tri.csv", [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)])
    cli("persistence", tmp_path / "tri.csv", "--out-dir", tmp_path)
    rows = (tmp_path / "diagram.csv").read_text().splitlines()
    assert rows[0] == "dim,birth,death,birth_simplex,death_simplex"
    assert len(rows) == 5
    assert [r.split(",")[0] for r in rows[1:]] == ["0", "0", "0", "1"]


def test_embed_linear_matches_library_run(tmp_path):
    cli("generate", "--dataset", "circle", "--seed", 4, "--out-dir", tmp_path)
    io.write_spec(tmp_path / "circle.json", io.read_spec(CONFIGS / "circle_spec.json"))
    cli("embed", "--backend", "linear", "--data", tmp_path / "data.csv", "--topo-spec",
        tmp_path / "circle.json", "--lambda-top", 10, "--lr", 0.1, "--epochs", 15,
        "--method", "adam", "--seed", 4, "--out-dir", tmp_path / "out")
    _, X = io.read_matrix(tmp_path / "data.csv")
    res = run(LinearProjectionModel(X), io.read_spec(tmp_path / "circle.json"),
              OptimizerConfig(lambda_top=10, learning_rate=0.1, epochs=15, method="adam", seed=4))
    _, emb = io.read_points(tmp_path / "out" / "embedding.csv")
    _, W = io.read_matrix(tmp_path / "out" / "loadings.csv")
    assert emb.tobytes() == res.embedding.tobytes()
    assert W.tobytes() == res.params.tobytes()
    trace = io.read_trace(tmp_path / "out" / "trace.csv")
    assert trace.topo_loss == res.trace.topo_loss and set(trace.seconds) == {0.0}


def test_generate_all_datasets(tmp_path):
    for name, files in (("circle", ["data.csv", "angles.csv"]),
                        ("bifurcation", ["data.csv", "labels.csv"]),
                        ("clusters", ["points.csv", "labels.csv"]),
                        ("karate", ["edges.txt", "labels.csv"])):
        out = tmp_path / name
        cli("generate", "--dataset", name, "--out-dir", out)
        assert sorted(p.name for p in out.iterdir()) == sorted(files)
    _, X = io.read_matrix(tmp_path / "circle" / "data.csv")
    assert X.shape == (50, 500)
    assert len(io.read_edge_list(tmp_path / "karate" / "edges.txt").edges) == 78


def test_optimize_pseudotime_plot_pipeline(tmp_path):
    rng = np.random.default_rng(0)
    theta = rng.uniform(0, 2 * np.pi, 30)
    # radial noise avoids cocircular ties, where the loss has no descent subgradient
    radius = 1 + 0.1 * rng.random(30)
    io.write_points(tmp_path / "circle.csv", radius[:, None] * np.c_[np.cos(theta), np.sin(theta)])
    io.write_spec(tmp_path / "spec.json", io.read_spec(CONFIGS / "circle_spec.json"))
    cli("optimize", tmp_path / "circle.csv", "--topo-spec", tmp_path / "spec.json",
        "--epochs", 5, "--lr", 0.01, "--out-dir", tmp_path / "opt")
    trace = io.read_trace(tmp_path / "opt" / "trace.csv")
    assert trace.epoch == list(range(6)) and trace.topo_loss[-1] < trace.topo_loss[0]
    cli("pseudotime", tmp_path / "opt" / "embedding.csv", "--out-dir", tmp_path / "pt")
    ids, pt, _, _ = io.read_pseudotime(tmp_path / "pt" / "pseudotime.csv")
    assert len(ids) == 30 and np.all((pt >= 0) & (pt < 2 * np.pi))

    before = {p: p.read_bytes() for p in (tmp_path / "opt").iterdir()}
    cli("persistence", tmp_path / "opt" / "embedding.csv", "--out-dir", tmp_path / "opt")
    before[tmp_path / "opt" / "diagram.csv"] = (tmp_path / "opt" / "diagram.csv").read_bytes()
    cli("plot", "--embedding", tmp_path / "opt" / "embedding.csv", "--diagram",
        tmp_path / "opt" / "diagram.csv", "--trace", tmp_path / "opt" / "trace.csv",
        "--out-dir", tmp_path / "plots")
    for name in ("embedding.svg", "diagram.svg", "trace.svg"):
        ET.fromstring((tmp_path / "plots" / name).read_text())
    assert {p: p.read_bytes() for p in before} == before


def test_embed_from_config_and_report(tmp_path):
    cli("embed", "--config", CONFIGS / "karate.json", "--epochs", 2, "--out-dir", tmp_path / "k")
    ids, emb = io.read_points(tmp_path / "k" / "embedding.csv")
    assert len(ids) == 34 and emb.shape == (34, 2)
    cli("report", CONFIGS / "blob_two_clusters.json", CONFIGS / "four_clusters.json",
        "--epochs", 2, "--out-dir", tmp_path / "r")
    lines = (tmp_path / "r" / "report.csv").read_text().splitlines()
    assert lines[0] == "experiment,variant,emb_loss,topo_loss"
    assert [l.split(",")[:2] for l in lines[1:]] == [["blob_two_clusters", "topo_only"],
                                                     ["four_clusters", "topo_only"]]


def test_errors_are_single_line_json(tmp_path, capsys):
    code, err = failure(capsys, "persistence", tmp_path / "missing.csv")
    assert code == 1 and err["error"] == "ToporegError"
    code, err = failure(capsys, "frobnicate")
    assert code == 2 and err["error"] == "UsageError"
    io.write_points(tmp_path / "dup.csv", [(0, 0), (0, 0), (1, 1)])
    code, err = failure(capsys, "persistence", tmp_path / "dup.csv")
    assert code == 1 and err["error"] == "DuplicatePointsError"
    io.write_points(tmp_path / "ok.csv", [(0, 0), (1, 0), (1, 1)])
    code, err = failure(capsys, "optimize", tmp_path / "ok.csv")
    assert code == 1 and err["error"] == "ConfigError"
    code, err = failure(capsys, "embed", "--backend", "linear")
    assert err["error"] == "ConfigError"
    (tmp_path / "cfg.json").write_text(json.dumps({"experiment": "e", "backend": "linear",
                                                   "data": {"generator": "circle"}, "extra": 1}))
    code, err = failure(capsys, "embed", "--config", tmp_path / "cfg.json")
    assert code == 1 and err["error"] == "ConfigError"
    code, err = failure(capsys, "generate", "--dataset", "clusters", "--preset", "nope")
    assert err["error"] == "ConfigError"


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "toporeg.cli", "--version"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.startswith("toporeg ")
