"""Embedding backends: each exposes its parameters, the 2-D point cloud they
induce, an embedding loss with its gradient, and the pull-back of a gradient
on the points to the parameters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import curve_fit
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.special import expit, log_expit

from .errors import EmptyGraphError, RankDeficientError, ShapeMismatchError


class EmbeddingModel:
    """Interface shared by the backends.

    ``params`` holds the initial parameters; the optimizer never mutates it.
    """

    params: np.ndarray

    def embed(self, params: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def loss_grad(self, params: np.ndarray, rng=None) -> Tuple[float, np.ndarray]:
        raise NotImplementedError

    def pullback(self, params: np.ndarray, grad_points: np.ndarray) -> np.ndarray:
        return grad_points

    def constraint_grad(self, params: np.ndarray) -> Tuple[float, np.ndarray]:
        """Part of the loss that constrains the parametrization itself.

        It stays active when the embedding loss is dropped.
        """
        return 0.0, np.zeros_like(params)

    def report_loss(self, params: np.ndarray, rng=None) -> float:
        """Embedding loss as reported for a finished run."""
        return self.loss_grad(params, rng)[0]


class CoordinateModel(EmbeddingModel):
    """Free point coordinates with no embedding loss (pure topological optimization)."""

    def __init__(self, points):
        self.params = np.array(points, dtype=float)

    def embed(self, params):
        return params

    def loss_grad(self, params, rng=None):
        return 0.0, np.zeros_like(params)


# --------------------------------------------------------------------------
# linear projection
# --------------------------------------------------------------------------

def pca_init(X) -> np.ndarray:
    """Top-2 principal loadings (D x 2) of the column-centered data.

    Each column is sign-fixed so that its largest-magnitude entry is positive.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 2:
        raise ShapeMismatchError(f"pca_init needs n >= 2 and D >= 2, got {X.shape}")
    Xc = X - X.mean(axis=0)
    _, s, vt = np.linalg.svd(Xc, full_matrices=False)
    tol = max(Xc.shape) * np.finfo(float).eps * (s[0] if len(s) else 0.0)
    if len(s) < 2 or s[1] <= tol:
        raise RankDeficientError("centered data has fewer than 2 nonzero singular values")
    W = vt[:2].T.copy()
    for k in range(2):
        if W[np.argmax(np.abs(W[:, k])), k] < 0:
            W[:, k] *= -1
    return W


def feature_importance(W) -> np.ndarray:
    """Per-feature sum of absolute loadings over the two embedding axes."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[1] != 2:
        raise ShapeMismatchError(f"expected a D x 2 loading matrix, got {W.shape}")
    return np.abs(W[:, 0]) + np.abs(W[:, 1])


# Below this the orthogonality residual is rounding noise; the zero
# subgradient is used there.
_ORTHO_KINK = 1e-12


def ortho_penalty(W, norm: str = "fro") -> Tuple[float, np.ndarray]:
    """``||W^T W - I||`` and a (sub)gradient with respect to W."""
    M = W.T @ W - np.eye(W.shape[1])
    if norm == "fro":
        val = float(np.sqrt(np.sum(M * M)))
        if val <= _ORTHO_KINK:
            return val, np.zeros_like(W)
        return val, 2.0 * W @ M / val
    if norm == "spectral":
        evals, evecs = np.linalg.eigh(M)
        k = int(np.argmax(np.abs(evals)))
        val = float(abs(evals[k]))
        if val <= _ORTHO_KINK:
            return val, np.zeros_like(W)
        v = evecs[:, k:k + 1]
        return val, 2.0 * np.sign(evals[k]) * W @ (v @ v.T)
    raise ValueError(f"unknown norm {norm!r}")


class LinearProjectionModel(EmbeddingModel):
    """Linear projection E = X W of (optionally centered) data X.

    Loss: mean squared reconstruction error of X W W^T against X plus
    ``ortho_weight * ||W^T W - I||`` (Frobenius by default).
    """

    def __init__(self, data, loadings=None, ortho_weight: float = 1e4,
                 ortho_norm: str = "fro", center: bool = True):
        X = np.asarray(data, dtype=float)
        if X.ndim != 2:
            raise ShapeMismatchError(f"data must be a matrix, got shape {X.shape}")
        self.data = X - X.mean(axis=0) if center else X.copy()
        W = pca_init(self.data) if loadings is None else np.array(loadings, dtype=float)
        if W.shape != (X.shape[1], 2):
            raise ShapeMismatchError(f"loadings shape {W.shape} does not match data {X.shape}")
        self.params = W
        self.ortho_weight = float(ortho_weight)
        self.ortho_norm = ortho_norm

    def embed(self, params):
        return self.data @ params

    def reconstruction(self, params) -> Tuple[float, np.ndarray]:
        X = self.data
        E = X @ params
        R = E @ params.T - X
        scale = 2.0 / R.size
        grad = scale * (X.T @ (R @ params) + R.T @ E)
        return float(np.mean(R * R)), grad

    def loss_grad(self, params, rng=None):
        rec, g_rec = self.reconstruction(params)
        orth, g_orth = self.constraint_grad(params)
        return rec + orth, g_rec + g_orth

    def pullback(self, params, grad_points):
        return self.data.T @ grad_points

    def report_loss(self, params, rng=None):
        """Reconstruction error alone, without the orthogonality penalty."""
        return self.reconstruction(params)[0]

    def constraint_grad(self, params):
        orth, g_orth = ortho_penalty(params, self.ortho_norm)
        return self.ortho_weight * orth, self.ortho_weight * g_orth


def linear_loss(model: LinearProjectionModel, params=None):
    return model.loss_grad(model.params if params is None else params)


# --------------------------------------------------------------------------
# fuzzy neighbor graph embedding
# --------------------------------------------------------------------------

def smooth_knn(dist: np.ndarray, k: int, n_iter: int = 64):
    """Per-point (rho, sigma) so that sum exp(-(d - rho) / sigma) = log2(k).

    ``dist`` holds each point's k nearest-neighbor distances (self excluded),
    sorted ascending.
    """
    target = np.log2(k)
    rho = dist[:, 0].copy()
    sigma = np.ones(len(dist))
    for row in range(len(dist)):
        lo, hi, mid = 0.0, np.inf, 1.0
        d = np.maximum(dist[row] - rho[row], 0.0)
        for _ in range(n_iter):
            psum = np.exp(-d / mid).sum()
            if abs(psum - target) < 1e-5:
                break
            if psum > target:
                hi = mid
                mid = 0.5 * (lo + hi)
            else:
                lo = mid
                mid = mid * 2 if hi == np.inf else 0.5 * (lo + hi)
        mean_d = dist[row].mean()
        sigma[row] = max(mid, 1e-3 * mean_d) if mean_d > 0 else mid
    return rho, sigma


def fuzzy_graph(X, n_neighbors: int = 15):
    """Symmetric fuzzy kNN membership graph on raw Euclidean distances.

    Returns ``(heads, tails, weights)`` over unordered pairs ``head < tail``.
    """
    X = np.asarray(X, dtype=float)
    n = len(X)
    k = min(n_neighbors, n - 1)
    if k < 1:
        raise EmptyGraphError("need at least two observations")
    sq = np.sum(X * X, axis=1)
    D = np.sqrt(np.maximum(sq[:, None] + sq[None, :] - 2 * X @ X.T, 0.0))
    np.fill_diagonal(D, np.inf)
    nbr = np.argsort(D, axis=1, kind="stable")[:, :k]
    dist = np.take_along_axis(D, nbr, axis=1)
    rho, sigma = smooth_knn(dist, k)
    P = np.zeros((n, n))
    rows = np.repeat(np.arange(n), k)
    P[rows, nbr.ravel()] = np.exp(-np.maximum(dist - rho[:, None], 0.0) / sigma[:, None]).ravel()
    S = P + P.T - P * P.T
    heads, tails = np.nonzero(np.triu(S, 1))
    return heads, tails, S[heads, tails]


def fit_ab(min_dist: float = 0.1, spread: float = 1.0) -> Tuple[float, float]:
    """Fit (a, b) of 1 / (1 + a d^(2b)) to the offset-exponential target curve."""
    x = np.linspace(0, 3 * spread, 300)
    y = np.where(x < min_dist, 1.0, np.exp(-(x - min_dist) / spread))

    def curve(d, a, b):
        return 1.0 / (1.0 + a * d ** (2 * b))

    (a, b), _ = curve_fit(curve, x, y, p0=(1.0, 1.0))
    return float(a), float(b)


_REPULSION_EPS = 1e-3


class NeighborEmbeddingModel(EmbeddingModel):
    """Fuzzy-graph neighbor embedding with negative sampling.

    Attraction ``-w_ij log nu(d_ij)`` over graph edges and, per edge, ``m``
    uniformly drawn negatives ``-w_ij log(1 - nu(d_ik))`` with
    ``nu(d) = 1 / (1 + a d^(2b))``; the repulsive distance is softened by
    a small constant to keep the loss finite at d = 0.
    """

    def __init__(self, data, n_neighbors: int = 15, min_dist: float = 0.1,
                 negative_samples: int = 5, init=None, graph=None, ab=None):
        X = np.asarray(data, dtype=float)
        if graph is None:
            graph = fuzzy_graph(X, n_neighbors)
        self.heads, self.tails, self.weights = (np.asarray(g) for g in graph)
        if len(self.weights) == 0:
            raise EmptyGraphError("fuzzy graph has no edges")
        self.n = len(X)
        self.a, self.b = fit_ab(min_dist) if ab is None else ab
        self.negative_samples = int(negative_samples)
        if init is None:
            init = pca_embedding(X)
        self.params = np.array(init, dtype=float)

    def embed(self, params):
        return params

    def draw_negatives(self, rng):
        rng = np.random.default_rng(0 if rng is None else rng)
        return rng.integers(0, self.n, size=(len(self.weights), self.negative_samples))

    def loss_grad(self, params, rng=None, negatives=None):
        a, b = self.a, self.b
        Y = params
        h, t, w = self.heads, self.tails, self.weights
        grad = np.zeros_like(Y)

        diff = Y[h] - Y[t]
        d2 = np.einsum("ij,ij->i", diff, diff)
        pos = d2 > 0
        d2b = np.where(pos, d2, 1.0) ** b
        value = float(np.sum(w * np.log1p(a * np.where(pos, d2b, 0.0))))
        coef = np.where(pos, w * a * b * d2b / np.where(pos, d2, 1.0) / (1 + a * d2b), 0.0)
        g = 2.0 * coef[:, None] * diff
        np.add.at(grad, h, g)
        np.add.at(grad, t, -g)

        if self.negative_samples:
            neg = self.draw_negatives(rng) if negatives is None else negatives
            hh = np.repeat(h, neg.shape[1])
            ww = np.repeat(w, neg.shape[1])
            kk = neg.ravel()
            keep = kk != hh
            hh, ww, kk = hh[keep], ww[keep], kk[keep]
            diff = Y[hh] - Y[kk]
            s = np.einsum("ij,ij->i", diff, diff) + _REPULSION_EPS
            sb = s ** b
            # -log(1 - nu) = log(1 + a s^b) - log(a s^b)
            value += float(np.sum(ww * (np.log1p(a * sb) - np.log(a * sb))))
            coef = ww * (a * b * sb / s / (1 + a * sb) - b / s)
            g = 2.0 * coef[:, None] * diff
            np.add.at(grad, hh, g)
            np.add.at(grad, kk, -g)
        return value, grad


def low_dim_similarity(d, a, b):
    """nu(d) = 1 / (1 + a d^(2b))."""
    return 1.0 / (1.0 + a * np.asarray(d, dtype=float) ** (2 * b))


def pca_embedding(X, scale: float = 10.0) -> np.ndarray:
    """First two principal components rescaled to a maximal |coordinate| of ``scale``."""
    X = np.asarray(X, dtype=float)
    Xc = X - X.mean(axis=0)
    _, _, vt = np.linalg.svd(Xc, full_matrices=False)
    E = Xc @ vt[:2].T
    top = np.abs(E).max()
    return E * (scale / top) if top > 0 else E


def neighbor_loss(model: NeighborEmbeddingModel, params=None, rng=None):
    return model.loss_grad(model.params if params is None else params, rng)


# --------------------------------------------------------------------------
# graphs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on string-labelled nodes."""

    nodes: Tuple[str, ...]
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        clean = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u != v:
                clean.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(clean)))
        object.__setattr__(self, "nodes", tuple(str(n) for n in self.nodes))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[str, str]]) -> "Graph":
        index = {}
        for u, v in pairs:
            for x in (u, v):
                index.setdefault(x, len(index))
        return cls(tuple(index), tuple((index[u], index[v]) for u, v in pairs))

    @property
    def n(self) -> int:
        return len(self.nodes)

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for u, v in self.edges:
            A[u, v] = A[v, u] = 1.0
        return A

    def csr(self):
        nbrs = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        indptr = np.zeros(self.n + 1, dtype=int)
        indptr[1:] = np.cumsum([len(x) for x in nbrs])
        indices = np.array([v for x in nbrs for v in sorted(x)], dtype=int)
        return indptr, indices

    def components(self):
        """Connected components as sorted node-index lists, ordered by lowest member."""
        indptr, indices = self.csr()
        A = csr_matrix((np.ones(len(indices)), indices, indptr), shape=(self.n, self.n))
        _, label = connected_components(A, directed=False)
        comps = {}
        for node, c in enumerate(label):
            comps.setdefault(c, []).append(node)
        return sorted(comps.values())

    def largest_component(self) -> "Graph":
        comp = max(self.components(), key=len)
        remap = {old: new for new, old in enumerate(comp)}
        edges = tuple((remap[u], remap[v]) for u, v in self.edges if u in remap)
        return Graph(tuple(self.nodes[i] for i in comp), edges)


def random_init(n: int, rng=None, scale: float = 0.1) -> np.ndarray:
    rng = np.random.default_rng(0 if rng is None else rng)
    return scale * rng.standard_normal((n, 2))


# --------------------------------------------------------------------------
# random-walk (skip-gram) graph embedding
# --------------------------------------------------------------------------

class RandomWalkGraphModel(EmbeddingModel):
    """Skip-gram with negative sampling on truncated random walks.

    One embedding table serves as both center and context vectors. By
    default the loss is divided by the number of nodes, i.e. it is the loss
    of the walks started from one node; ``normalize="walk"`` divides by the
    number of walks and ``"sum"`` leaves it unscaled.
    """

    def __init__(self, graph: Graph, walk_length: int = 40, walks_per_node: int = 10,
                 window: int = 5, negative_samples: int = 5, init=None, seed=0,
                 normalize: str = "node"):
        if normalize not in ("node", "walk", "sum"):
            raise ValueError(f"unknown normalization {normalize!r}")
        self.normalize = normalize
        if not graph.edges:
            raise EmptyGraphError("graph has no edges")
        self.graph = graph
        self.indptr, self.indices = graph.csr()
        self.degree = np.diff(self.indptr)
        self.walk_length = int(walk_length)
        self.walks_per_node = int(walks_per_node)
        self.window = int(window)
        self.negative_samples = int(negative_samples)
        self.params = random_init(graph.n, seed) if init is None else np.array(init, dtype=float)

    def embed(self, params):
        return params

    def walks(self, rng) -> np.ndarray:
        rng = np.random.default_rng(0 if rng is None else rng)
        starts = np.tile(np.arange(self.graph.n), self.walks_per_node)
        walks = np.empty((len(starts), self.walk_length), dtype=int)
        walks[:, 0] = starts
        for step in range(1, self.walk_length):
            cur = walks[:, step - 1]
            deg = self.degree[cur]
            pick = np.floor(rng.random(len(cur)) * np.maximum(deg, 1)).astype(int)
            nxt = self.indices[np.minimum(self.indptr[cur] + pick, len(self.indices) - 1)]
            walks[:, step] = np.where(deg > 0, nxt, cur)
        return walks

    def cooccurrences(self, walks) -> np.ndarray:
        pairs = []
        for off in range(1, self.window + 1):
            if off >= walks.shape[1]:
                break
            a, b = walks[:, :-off].ravel(), walks[:, off:].ravel()
            pairs.append(np.stack([a, b], axis=1))
            pairs.append(np.stack([b, a], axis=1))
        pairs = np.concatenate(pairs)
        return pairs[pairs[:, 0] != pairs[:, 1]]

    def sample(self, rng):
        """Walk count plus positive and negative co-occurrence count matrices.

        Walks and negatives are drawn from one generator; entry (u, v) counts
        how often v served as a (negative) context of center u.
        """
        rng = np.random.default_rng(0 if rng is None else rng)
        walks = self.walks(rng)
        pairs = self.cooccurrences(walks)
        n = self.graph.n
        neg = rng.integers(0, n, size=(len(pairs), self.negative_samples))
        pos = np.bincount(pairs[:, 0] * n + pairs[:, 1], minlength=n * n).reshape(n, n)
        centers = np.repeat(pairs[:, 0], self.negative_samples)
        negc = np.bincount(centers * n + neg.ravel(), minlength=n * n).reshape(n, n)
        return walks.shape[0], pos.astype(float), negc.astype(float)

    def loss_grad(self, params, rng=None, sample=None):
        n_walks, pos, neg = self.sample(rng) if sample is None else sample
        E = params
        S = E @ E.T
        value = -float(np.sum(pos * log_expit(S)) + np.sum(neg * log_expit(-S)))
        G = neg * expit(S) - pos * expit(-S)
        scale = self.normalizer(n_walks)
        return value / scale, (G + G.T) @ E / scale

    def normalizer(self, n_walks):
        return {"walk": n_walks, "node": self.graph.n, "sum": 1}[self.normalize]


def random_walk_loss(model: RandomWalkGraphModel, rng=None, params=None):
    return model.loss_grad(model.params if params is None else params, rng)


# --------------------------------------------------------------------------
# inner-product graph embedding
# --------------------------------------------------------------------------

class InnerProductGraphModel(EmbeddingModel):
    """Edge probability sigmoid(<e_u, e_v>) fitted to the edge indicator by
    mean binary cross-entropy over all unordered node pairs."""

    def __init__(self, graph: Graph, init=None, seed=0):
        if graph.n < 2:
            raise EmptyGraphError("need at least two nodes")
        self.graph = graph
        self.target = graph.adjacency()
        self.params = random_init(graph.n, seed) if init is None else np.array(init, dtype=float)

    def embed(self, params):
        return params

    def loss_grad(self, params, rng=None):
        E = params
        n = len(E)
        S = E @ E.T
        iu = np.triu_indices(n, 1)
        x, y = S[iu], self.target[iu]
        n_pairs = len(x)
        # softplus(x) - y x
        value = float(np.sum(np.logaddexp(0.0, x) - y * x)) / n_pairs
        G = np.zeros((n, n))
        G[iu] = (expit(x) - y) / n_pairs
        G = G + G.T
        return value, G @ E


def inner_product_loss(model: InnerProductGraphModel, params=None):
    return model.loss_grad(model.params if params is None else params)
