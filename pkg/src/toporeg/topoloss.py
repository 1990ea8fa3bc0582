"""Topological loss functions on planar point clouds and their gradients.

A term sums ``mu * (d - b)**p * ((d + b) / 2)**q`` over the pairs ranked
``i..j`` (1-based) of a persistence diagram ordered by decreasing
persistence. Essential pairs keep their rank but contribute nothing.
Optionally the cloud is first restricted to points far from its mean
(centrality <= tau) and/or the term is averaged over random subsamples.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, DegenerateCloudError, TooFewPointsError
from .geometry import PointCloud, alpha_filtration, check_points, value_grad_local
from .persistence import compute_persistence

MIN_POINTS = 3


@dataclass(frozen=True)
class TopoLossTerm:
    dim: int
    i: int = 1
    j: Optional[int] = None  # None means no upper bound
    mu: int = 1
    p: float = 1.0
    q: float = 0.0
    f_s: Optional[float] = None
    n_s: int = 1
    replace: bool = False
    tau: Optional[float] = None

    def __post_init__(self):
        if self.dim not in (0, 1):
            raise ConfigError(f"dim must be 0 or 1, got {self.dim}")
        if self.i < 1 or (self.j is not None and self.j < self.i):
            raise ConfigError(f"need 1 <= i <= j, got i={self.i}, j={self.j}")
        if self.mu not in (1, -1):
            raise ConfigError(f"mu must be +1 or -1, got {self.mu}")
        if not self.p > 0 or not self.q >= 0:
            raise ConfigError(f"need p > 0 and q >= 0, got p={self.p}, q={self.q}")
        if self.f_s is not None and not 0 < self.f_s <= 1:
            raise ConfigError(f"f_s must lie in (0, 1], got {self.f_s}")
        if self.n_s < 1:
            raise ConfigError(f"n_s must be >= 1, got {self.n_s}")
        if self.tau is not None and not self.tau > 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class TopoLossSpec:
    terms: Tuple[Tuple[float, TopoLossTerm], ...] = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple((float(w), t) for w, t in self.terms)
        if not terms:
            raise ConfigError("a loss spec needs at least one term")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, term: TopoLossTerm, weight: float = 1.0) -> "TopoLossSpec":
        return cls(((weight, term),))

    @classmethod
    def from_dict(cls, doc) -> "TopoLossSpec":
        if not isinstance(doc, dict) or set(doc) != {"terms"}:
            raise ConfigError('loss spec must be an object with the single key "terms"')
        allowed = {"weight", "dim", "i", "j", "mu", "p", "q", "f_s", "n_s", "tau", "replace"}
        terms = []
        for raw in doc["terms"]:
            unknown = set(raw) - allowed
            if unknown:
                raise ConfigError(f"unknown loss-term keys: {sorted(unknown)}")
            raw = dict(raw)
            weight = raw.pop("weight", 1.0)
            if raw.get("n_s") is None:
                raw.pop("n_s", None)
            for key in ("p", "q"):
                if raw.get(key) is None:
                    raw.pop(key, None)
            try:
                terms.append((weight, TopoLossTerm(**raw)))
            except TypeError as err:
                raise ConfigError(str(err)) from None
        return cls(tuple(terms))

    def to_dict(self):
        out = []
        for w, t in self.terms:
            d = asdict(t)
            replace = d.pop("replace")
            entry = {"weight": w, **d}
            if replace:
                entry["replace"] = True
            out.append(entry)
        return {"terms": out}


def centrality(cloud) -> np.ndarray:
    """Scaled centrality 1 - |x - mean| / max_y |y - mean| of every point."""
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=float)
    if len(pts) < 2:
        raise DegenerateCloudError("centrality needs at least two points")
    dist = np.linalg.norm(pts - pts.mean(axis=0), axis=1)
    top = dist.max()
    if top == 0:
        raise DegenerateCloudError("all points coincide")
    return 1.0 - dist / top


def _pair_weight(b, d, term):
    """Value of one pair and its partial derivatives in (birth, death)."""
    pers = d - b
    mid = 0.5 * (d + b)
    fp = pers ** term.p
    if term.q == 0:
        val = fp
        dpers = term.p * pers ** (term.p - 1)
        return val, -dpers, dpers
    fq = mid ** term.q
    val = fp * fq
    dpers = term.p * pers ** (term.p - 1) * fq
    dmid = fp * term.q * mid ** (term.q - 1) if mid > 0 else 0.0
    return val, -dpers + 0.5 * dmid, dpers + 0.5 * dmid


def diagram_term(pts: np.ndarray, term: TopoLossTerm, need_grad: bool = True):
    """Deterministic term value (no restriction or sampling) and its gradient."""
    pts = check_points(pts)
    filt = alpha_filtration(pts)
    diagram = compute_persistence(filt, max_dim=term.dim)[term.dim]
    stop = len(diagram) if term.j is None else min(term.j, len(diagram))
    value = 0.0
    grad = np.zeros_like(pts) if need_grad else None
    for pair in diagram.pairs[term.i - 1:stop]:
        if pair.essential:
            continue
        val, db, dd = _pair_weight(pair.birth, pair.death, term)
        value += val
        if need_grad:
            for simplex, coef in ((pair.birth_simplex, db), (pair.death_simplex, dd)):
                if coef == 0:
                    continue
                verts, g = value_grad_local(pts, filt, simplex)
                grad[list(verts)] += coef * g
    value *= term.mu
    if need_grad:
        grad *= term.mu
    return value, grad


def sample_size(n: int, f_s: float) -> int:
    # round half up
    return int(math.floor(f_s * n + 0.5))


def _evaluate(cloud, term: TopoLossTerm, rng, need_grad):
    pts = cloud.points if isinstance(cloud, PointCloud) else check_points(cloud)
    n = len(pts)
    idx = np.arange(n)
    if term.tau is not None:
        idx = np.nonzero(centrality(pts) <= term.tau)[0]
        if len(idx) < MIN_POINTS:
            raise TooFewPointsError(
                f"only {len(idx)} points have centrality <= {term.tau}")
    grad = np.zeros_like(pts) if need_grad else None
    if term.f_s is None:
        value, g = diagram_term(pts[idx], term, need_grad)
        if need_grad:
            grad[idx] = g
        return value, grad

    size = sample_size(len(idx), term.f_s)
    if size < MIN_POINTS:
        raise TooFewPointsError(
            f"sampling fraction {term.f_s} of {len(idx)} points leaves {size} < {MIN_POINTS}")
    rng = np.random.default_rng(0 if rng is None else rng)
    # running means stay exact when every sample is the full set
    value = 0.0
    for k in range(1, term.n_s + 1):
        pick = np.unique(rng.choice(len(idx), size=size, replace=term.replace))
        if len(pick) < MIN_POINTS:
            raise TooFewPointsError(f"sample has only {len(pick)} distinct points")
        sub = idx[pick]
        v, g = diagram_term(pts[sub], term, need_grad)
        value += (v - value) / k
        if need_grad:
            full = np.zeros_like(pts)
            full[sub] = g
            grad += (full - grad) / k
    return value, grad


def term_value(cloud, term: TopoLossTerm, rng=None) -> float:
    """Value of a single term.

    ``rng`` (a seed or ``numpy.random.Generator``) drives subsampling; the
    same seed gives the same samples as :func:`term_gradient`.
    """
    return _evaluate(cloud, term, rng, need_grad=False)[0]


def term_gradient(cloud, term: TopoLossTerm, rng=None):
    """``(value, (n, 2) gradient)`` of a single term.

    Restriction membership and sample draws are held fixed, so the gradient
    is the one of the selected persistence pairs only.
    """
    return _evaluate(cloud, term, rng, need_grad=True)


def spec_value(cloud, spec: TopoLossSpec, rng=None) -> float:
    rng = np.random.default_rng(0 if rng is None else rng)
    return sum(w * term_value(cloud, t, rng) for w, t in spec.terms)


def spec_gradient(cloud, spec: TopoLossSpec, rng=None):
    """Weighted sum of term values and gradients.

    Terms draw their samples one after another from a single generator.
    """
    pts = cloud.points if isinstance(cloud, PointCloud) else check_points(cloud)
    rng = np.random.default_rng(0 if rng is None else rng)
    value = 0.0
    grad = np.zeros_like(pts)
    for w, t in spec.terms:
        v, g = term_gradient(pts, t, rng)
        value += w * v
        grad += w * g
    return value, grad


def total_persistence(cloud, dim: int = 0) -> float:
    """Sum of finite persistence in dimension ``dim``."""
    return diagram_term(np.asarray(cloud, dtype=float), TopoLossTerm(dim=dim), need_grad=False)[0]
