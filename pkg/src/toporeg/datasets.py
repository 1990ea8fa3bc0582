"""Synthetic data generators and the bundled Karate club graph."""

from __future__ import annotations

import json
from importlib import resources
from typing import Sequence, Tuple

import numpy as np

from .embeddings import Graph
from .errors import BadDimensionsError, FixtureMissingError

# Four well-separated blobs on the corners of a square, standing in for the
# glyph clouds used in cluster experiments.
CLUSTER_PRESETS = {
    "four_corners": dict(centers=((0.0, 0.0), (4.0, 0.0), (0.0, 4.0), (4.0, 4.0)),
                         points_per_cluster=25, spread=0.2),
    "blob": dict(centers=((0.0, 0.0),), points_per_cluster=50, spread=1.0),
}

JUNCTION_LABEL = 3


def _lift(plane: np.ndarray, ambient_dim: int, noise_half_width: float, rng) -> np.ndarray:
    noise = rng.uniform(-noise_half_width, noise_half_width, size=(len(plane), ambient_dim - 2))
    return np.hstack([plane, noise])


def generate_circle(n: int = 50, ambient_dim: int = 500, noise_half_width: float = 0.45,
                    seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Unit-circle samples in the first two columns, uniform noise elsewhere.

    Returns ``(X, angles)`` with ``angles`` in [0, 2 pi).
    """
    if n < 3 or ambient_dim < 2:
        raise BadDimensionsError(f"need n >= 3 and ambient_dim >= 2, got {n}, {ambient_dim}")
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2 * np.pi, size=n)
    plane = np.column_stack([np.cos(angles), np.sin(angles)])
    return _lift(plane, ambient_dim, noise_half_width, rng), angles


def generate_clusters(centers: Sequence[Sequence[float]], points_per_cluster: int = 25,
                      spread: float = 0.2, seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Isotropic Gaussian blobs; returns ``(points, labels)`` with labels = center index."""
    centers = np.asarray(centers, dtype=float)
    if centers.ndim != 2 or len(centers) < 1:
        raise BadDimensionsError("need at least one center")
    rng = np.random.default_rng(seed)
    pts = np.concatenate([c + spread * rng.standard_normal((points_per_cluster, centers.shape[1]))
                          for c in centers])
    labels = np.repeat(np.arange(len(centers)), points_per_cluster)
    return pts, labels


def cluster_preset(name: str, seed: int = 0):
    return generate_clusters(**CLUSTER_PRESETS[name], seed=seed)


def generate_bifurcation(arm_length_points: int = 50, ambient_dim: int = 50,
                         noise_half_width: float = 0.45, seed: int = 0):
    """Planar 'Y' of three unit arms meeting at the origin, lifted with noise.

    Row 0 is the junction (label 3); arm ``a`` points sit at uniform random
    positions along the arm at angle ``90 + 120 a`` degrees (label ``a``).
    Returns ``(X, labels)``.
    """
    if arm_length_points < 1 or ambient_dim < 2:
        raise BadDimensionsError(
            f"need arm_length_points >= 1 and ambient_dim >= 2, got {arm_length_points}, {ambient_dim}")
    rng = np.random.default_rng(seed)
    rows = [np.zeros((1, 2))]
    labels = [JUNCTION_LABEL]
    for arm in range(3):
        theta = np.pi / 2 + arm * 2 * np.pi / 3
        t = np.sort(rng.uniform(0.0, 1.0, size=arm_length_points))
        rows.append(np.outer(t, [np.cos(theta), np.sin(theta)]))
        labels += [arm] * arm_length_points
    plane = np.vstack(rows)
    return _lift(plane, ambient_dim, noise_half_width, rng), np.array(labels)


def load_karate() -> Tuple[Graph, np.ndarray]:
    """Zachary's karate club: 34 members, 78 ties, and the two clubs after the split."""
    try:
        text = resources.files("toporeg").joinpath("data/karate.json").read_text()
    except (FileNotFoundError, ModuleNotFoundError) as err:
        raise FixtureMissingError(f"karate fixture missing: {err}") from None
    doc = json.loads(text)
    graph = Graph(tuple(doc["nodes"]), tuple(tuple(e) for e in doc["edges"]))
    return graph, np.array(doc["labels"])
