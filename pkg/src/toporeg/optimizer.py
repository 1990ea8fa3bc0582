"""Gradient-descent loop for embedding loss plus weighted topological loss."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .embeddings import EmbeddingModel, LinearProjectionModel
from .errors import ConfigError, NonFiniteLossError
from .topoloss import TopoLossSpec, spec_gradient

# stream ids within an epoch
EMB_STREAM = 0
TOPO_STREAM = 1


@dataclass(frozen=True)
class OptimizerConfig:
    lambda_top: float = 0.0
    learning_rate: float = 0.1
    epochs: int = 100
    method: str = "gd"  # "gd" or "adam"
    seed: int = 0
    topo_only: bool = False
    record_every: int = 1
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if not self.lambda_top >= 0:
            raise ConfigError(f"lambda_top must be >= 0, got {self.lambda_top}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 1 or self.record_every < 1:
            raise ConfigError("epochs and record_every must be >= 1")
        if self.method not in ("gd", "adam"):
            raise ConfigError(f"method must be 'gd' or 'adam', got {self.method!r}")


def epoch_rng(seed: int, epoch: int, stream: int) -> np.random.Generator:
    """Independent generator for one stochastic component of one epoch."""
    return np.random.default_rng([int(seed) & (2 ** 64 - 1), epoch, stream])


@dataclass
class LossTrace:
    """Losses of the parameters at the start of each recorded epoch.

    The last row (epoch == number of epochs) describes the final parameters.
    """

    epoch: List[int] = field(default_factory=list)
    emb_loss: List[float] = field(default_factory=list)
    topo_loss: List[float] = field(default_factory=list)
    total_loss: List[float] = field(default_factory=list)
    seconds: List[float] = field(default_factory=list)

    def append(self, epoch, emb, topo, total, seconds):
        self.epoch.append(int(epoch))
        self.emb_loss.append(float(emb))
        self.topo_loss.append(float(topo))
        self.total_loss.append(float(total))
        self.seconds.append(float(seconds))

    def __len__(self):
        return len(self.epoch)

    def rows(self):
        return list(zip(self.epoch, self.emb_loss, self.topo_loss, self.total_loss, self.seconds))


@dataclass
class RunResult:
    params: np.ndarray
    embedding: np.ndarray
    trace: LossTrace

    def __iter__(self):
        return iter((self.params, self.embedding, self.trace))


class _Adam:
    def __init__(self, shape, cfg: OptimizerConfig):
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.t = 0
        self.cfg = cfg

    def step(self, grad):
        c = self.cfg
        self.t += 1
        self.m = c.beta1 * self.m + (1 - c.beta1) * grad
        self.v = c.beta2 * self.v + (1 - c.beta2) * grad * grad
        mhat = self.m / (1 - c.beta1 ** self.t)
        vhat = self.v / (1 - c.beta2 ** self.t)
        return c.learning_rate * mhat / (np.sqrt(vhat) + c.adam_eps)


def evaluate(model: EmbeddingModel, spec: Optional[TopoLossSpec], params, seed: int, epoch: int,
             cfg: Optional[OptimizerConfig] = None):
    """Losses and total gradient of ``params`` under the epoch's rng streams.

    Returns ``(emb_loss, topo_loss, total_loss, gradient)``.
    """
    cfg = cfg or OptimizerConfig(seed=seed)
    emb, g_emb = model.loss_grad(params, epoch_rng(seed, epoch, EMB_STREAM))
    if spec is not None:
        topo, g_pts = spec_gradient(model.embed(params), spec, epoch_rng(seed, epoch, TOPO_STREAM))
        g_top = model.pullback(params, g_pts)
    else:
        topo, g_top = 0.0, np.zeros_like(params)
    if cfg.topo_only:
        pen, g_pen = model.constraint_grad(params)
        return emb, topo, topo + pen, g_top + g_pen
    lam = cfg.lambda_top
    if lam == 0:
        return emb, topo, emb, g_emb
    return emb, topo, emb + lam * topo, g_emb + lam * g_top


def run(model: EmbeddingModel, spec: Optional[TopoLossSpec], config: OptimizerConfig) -> RunResult:
    """Optimize the model's parameters; see :class:`OptimizerConfig`.

    Every stochastic element of epoch ``e`` is drawn from
    ``epoch_rng(seed, e, stream)``, so runs are reproducible bit for bit.
    """
    params = np.array(model.params, dtype=float)
    trace = LossTrace()
    adam = _Adam(params.shape, config) if config.method == "adam" else None
    last_finite = (params, -1)
    start = time.perf_counter()
    for epoch in range(config.epochs + 1):
        # divergence is reported below as NonFiniteLossError, not as numpy warnings
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            emb, topo, total, grad = evaluate(model, spec, params, config.seed, epoch, config)
        if not (np.isfinite(total) and np.all(np.isfinite(grad))):
            raise NonFiniteLossError(
                f"non-finite loss or gradient at epoch {epoch}",
                params=last_finite[0], epoch=last_finite[1], trace=trace)
        last_finite = (params, epoch)
        if epoch % config.record_every == 0 or epoch == config.epochs:
            trace.append(epoch, emb, topo, total, time.perf_counter() - start)
        if epoch == config.epochs:
            break
        step = adam.step(grad) if adam else config.learning_rate * grad
        params = params - step
    return RunResult(params, model.embed(params), trace)


def run_linear_with_topo(X, W0, spec: Optional[TopoLossSpec], config: OptimizerConfig,
                         ortho_weight: float = 1e4, center: bool = True) -> RunResult:
    """Run on a linear projection of X started from loadings W0."""
    model = LinearProjectionModel(X, W0, ortho_weight=ortho_weight, center=center)
    return run(model, spec, config)
