import json
from pathlib import Path

import numpy as np
import pytest

from toporeg.config import load_config, parse_config, schema
from toporeg.errors import ConfigError
from toporeg.experiments import build_model, generate, load_data, run_variants, variant_config
from toporeg.optimizer import OptimizerConfig

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
MINIMAL = {"experiment": "x", "data": {"generator": "circle"}, "backend": "linear"}


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.json") if p.name != "circle_spec.json"))
def test_shipped_configs_validate(name):
    cfg = load_config(CONFIGS / name)
    assert cfg.experiment and cfg.variants


def test_schema_is_strict():
    doc = schema()
    assert doc["additionalProperties"] is False


@pytest.mark.parametrize("patch", [
    {"unknown": 1},
    {"data": {"generator": "circle", "bogus": 1}},
    {"data": {"generator": "circle", "matrix": "x.csv"}},
    {"data": {}},
    {"backend": "tsne"},
    {"optimizer": {"learning_rate": 0}},
    {"optimizer": {"lr": 0.1}},
    {"topo_spec": {"terms": [{"dim": 0, "weird": 1}]}},
    {"topo_spec": {"terms": []}},
    {"variants": ["ordinary", "ordinary"]},
    {"variant_overrides": {"ordinary": {"epochs": 0}}},
    {"backend_options": {"n_neighbors": 0}},
])
def test_invalid_documents_rejected(patch):
    with pytest.raises(ConfigError):
        parse_config({**MINIMAL, **patch})


def test_defaults_and_relative_paths(tmp_path):
    (tmp_path / "sub").mkdir()
    (tmp_path / "sub" / "cfg.json").write_text(json.dumps(
        {"experiment": "e", "data": {"matrix": "m.csv"}, "backend": "linear"}))
    cfg = load_config(tmp_path / "sub" / "cfg.json")
    assert cfg.optimizer == OptimizerConfig()
    assert cfg.resolve("m.csv") == tmp_path / "sub" / "m.csv"
    assert cfg.resolve("/abs/m.csv") == Path("/abs/m.csv")
    assert cfg.with_optimizer(epochs=3).optimizer.epochs == 3


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.json")


def test_variant_config():
    base = OptimizerConfig(lambda_top=5.0, method="adam")
    assert variant_config(base, "ordinary").lambda_top == 0
    assert variant_config(base, "topo_only").topo_only
    assert variant_config(base, "regularized") == base
    assert variant_config(base, "ordinary", {"ordinary": {"method": "gd"}}).method == "gd"
    with pytest.raises(ConfigError):
        variant_config(base, "other")


def test_build_model_rejects_mismatches():
    data = generate("clusters", {"preset": "blob"}, 0)
    with pytest.raises(ConfigError):
        build_model("linear", data, {}, 0)
    with pytest.raises(ConfigError):
        build_model("coordinates", data, {"n_neighbors": 3}, 0)
    with pytest.raises(ConfigError):
        generate("clusters", {"preset": "nope"}, 0)
    with pytest.raises(ConfigError):
        generate("karate", {"n": 3}, 0)


def test_run_variants_small(tmp_path):
    cfg = load_config(CONFIGS / "four_clusters.json").with_optimizer(epochs=3)
    (res,) = run_variants(cfg)
    assert res.variant == "topo_only"
    assert res.topo_loss == res.result.trace.topo_loss[-1] < res.result.trace.topo_loss[0]


def test_labels_follow_ids(tmp_path):
    (tmp_path / "pts.csv").write_text("id,x,y\nb,0,0\na,1,0\nc,0,1\n")
    (tmp_path / "lab.csv").write_text("id,label\na,1\nb,0\nc,1\n")
    cfg = parse_config({"experiment": "e", "backend": "coordinates",
                        "data": {"points": "pts.csv", "labels": "lab.csv"}}, tmp_path)
    data = load_data(cfg)
    assert data.ids == ["b", "a", "c"] and list(data.labels) == ["0", "1", "1"]
    assert np.array_equal(data.points, [[0, 0], [1, 0], [0, 1]])
