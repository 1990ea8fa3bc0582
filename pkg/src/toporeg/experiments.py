"""Data loading, model construction and variant runs driven by a RunConfig."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from . import datasets, io
from .config import RunConfig
from .embeddings import (CoordinateModel, EmbeddingModel, Graph, InnerProductGraphModel,
                         LinearProjectionModel, NeighborEmbeddingModel, RandomWalkGraphModel,
                         random_init)
from .errors import ConfigError
from .optimizer import OptimizerConfig, RunResult, epoch_rng, EMB_STREAM, run


@dataclass
class Dataset:
    matrix: Optional[np.ndarray] = None
    points: Optional[np.ndarray] = None
    graph: Optional[Graph] = None
    labels: Optional[np.ndarray] = None
    ids: Optional[List[str]] = None
    angles: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        for x in (self.matrix, self.points):
            if x is not None:
                return len(x)
        return self.graph.n


def generate(name: str, options: dict, seed: int) -> Dataset:
    opts = dict(options)
    if name == "circle":
        X, angles = datasets.generate_circle(seed=seed, **opts)
        return Dataset(matrix=X, angles=angles)
    if name == "bifurcation":
        X, labels = datasets.generate_bifurcation(seed=seed, **opts)
        return Dataset(matrix=X, labels=labels)
    if name == "clusters":
        preset = opts.pop("preset", None)
        if preset is not None:
            if preset not in datasets.CLUSTER_PRESETS:
                raise ConfigError(f"unknown cluster preset {preset!r}")
            opts = {**datasets.CLUSTER_PRESETS[preset], **opts}
        pts, labels = datasets.generate_clusters(seed=seed, **opts)
        return Dataset(points=pts, labels=labels)
    if name == "karate":
        if opts:
            raise ConfigError("the karate dataset takes no options")
        graph, labels = datasets.load_karate()
        return Dataset(graph=graph, labels=labels, ids=list(graph.nodes))
    raise ConfigError(f"unknown generator {name!r}")


def load_data(cfg: RunConfig) -> Dataset:
    d = cfg.data
    if "generator" in d:
        data = generate(d["generator"], d.get("options", {}), cfg.optimizer.seed)
    elif "matrix" in d:
        data = Dataset(matrix=io.read_matrix(cfg.resolve(d["matrix"]))[1])
    elif "points" in d:
        ids, pts = io.read_points(cfg.resolve(d["points"]))
        data = Dataset(points=pts, ids=ids)
    else:
        graph = io.read_edge_list(cfg.resolve(d["edges"]))
        data = Dataset(graph=graph, ids=list(graph.nodes))
    if "labels" in d:
        ids, labels = io.read_labels(cfg.resolve(d["labels"]))
        if data.ids is not None:
            lookup = dict(zip(ids, labels))
            labels = [lookup[i] for i in data.ids]
        data.labels = np.array(labels)
    return data


def build_model(backend: str, data: Dataset, options: dict, seed: int) -> EmbeddingModel:
    opts = dict(options)
    init_scale = opts.pop("init_scale", 0.1)

    def need(attr, what):
        value = getattr(data, attr)
        if value is None:
            raise ConfigError(f"backend {backend!r} needs {what}")
        return value

    def reject(*keys):
        extra = set(opts) - set(keys)
        if extra:
            raise ConfigError(f"options {sorted(extra)} do not apply to backend {backend!r}")

    if backend == "linear":
        reject("ortho_weight", "ortho_norm", "center")
        return LinearProjectionModel(need("matrix", "a data matrix"), **opts)
    if backend == "neighbor":
        reject("n_neighbors", "min_dist", "negative_samples")
        return NeighborEmbeddingModel(need("matrix", "a data matrix"), **opts)
    if backend == "random_walk":
        reject("walk_length", "walks_per_node", "window", "negative_samples", "normalize")
        graph = need("graph", "a graph")
        return RandomWalkGraphModel(graph, init=random_init(graph.n, seed, init_scale), **opts)
    if backend == "inner_product":
        reject()
        graph = need("graph", "a graph")
        return InnerProductGraphModel(graph, init=random_init(graph.n, seed, init_scale))
    if backend == "coordinates":
        reject()
        return CoordinateModel(need("points", "a point set"))
    raise ConfigError(f"unknown backend {backend!r}")


def variant_config(cfg: OptimizerConfig, variant: str, overrides=None) -> OptimizerConfig:
    """Optimizer settings of one variant; ``overrides`` maps variant names
    to field changes applied first."""
    cfg = replace(cfg, **(overrides or {}).get(variant, {}))
    if variant == "ordinary":
        return replace(cfg, lambda_top=0.0, topo_only=False)
    if variant == "topo_only":
        return replace(cfg, topo_only=True)
    if variant == "regularized":
        return replace(cfg, topo_only=False)
    raise ConfigError(f"unknown variant {variant!r}")


@dataclass
class VariantResult:
    variant: str
    result: RunResult
    emb_loss: float
    topo_loss: float


class _Restarted(EmbeddingModel):
    """A model started from different parameters."""

    def __init__(self, base: EmbeddingModel, params):
        self.base = base
        self.params = np.array(params, dtype=float)

    def __getattr__(self, name):
        return getattr(self.base, name)

    def embed(self, params):
        return self.base.embed(params)

    def loss_grad(self, params, rng=None):
        return self.base.loss_grad(params, rng)

    def pullback(self, params, grad_points):
        return self.base.pullback(params, grad_points)

    def constraint_grad(self, params):
        return self.base.constraint_grad(params)

    def report_loss(self, params, rng=None):
        return self.base.report_loss(params, rng)


def run_variants(cfg: RunConfig, data: Optional[Dataset] = None,
                 variants: Optional[Tuple[str, ...]] = None) -> List[VariantResult]:
    """Run the requested variants of one experiment.

    The topological-optimization variant starts from the ordinary embedding
    when that was run, otherwise from the model's own initialization.
    """
    data = load_data(cfg) if data is None else data
    model = build_model(cfg.backend, data, cfg.backend_options, cfg.optimizer.seed)
    out = []
    ordinary = None
    for variant in (variants or cfg.variants):
        start = model
        if variant == "topo_only" and ordinary is not None:
            start = _Restarted(model, ordinary.params)
        oc = variant_config(cfg.optimizer, variant, cfg.variant_overrides)
        res = run(start, cfg.topo_spec, oc)
        if variant == "ordinary":
            ordinary = res
        emb = model.report_loss(res.params, epoch_rng(oc.seed, oc.epochs, EMB_STREAM))
        out.append(VariantResult(variant, res, emb, res.trace.topo_loss[-1]))
    return out
