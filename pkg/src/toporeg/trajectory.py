"""Circular pseudotime from the most persistent loop, plus embedding metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist
from sklearn.cluster import KMeans

from .errors import LengthMismatchError, SingleLabelError
from .geometry import PointCloud, alpha_filtration, check_points
from .persistence import compute_persistence, representative_cycle


@dataclass(frozen=True)
class CycleProjection:
    """Orthogonal projection of points onto a closed polygon.

    Segment ``k`` runs from anchor ``k`` to anchor ``k + 1`` (wrapping).
    """

    anchors: np.ndarray      # (L, 2) loop vertices in traversal order
    loop: Tuple[int, ...]    # point indices of the anchors, if known
    segment: np.ndarray      # (n,) segment index per point
    t: np.ndarray            # (n,) position along the segment in [0, 1]
    projected: np.ndarray    # (n, 2)
    arc_position: np.ndarray  # (n,) in [0, total_length)
    total_length: float

    @property
    def pseudotime(self) -> np.ndarray:
        return 2 * np.pi * self.arc_position / self.total_length


def signed_area(polygon) -> float:
    x, y = np.asarray(polygon, dtype=float).T
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def project_onto_loop(points, anchors, loop: Tuple[int, ...] = ()) -> CycleProjection:
    """Project every point to its nearest point on the closed polygon.

    Equidistant segments resolve to the lowest segment index.
    """
    pts = np.asarray(points, dtype=float)
    A = np.asarray(anchors, dtype=float)
    B = np.roll(A, -1, axis=0)
    seg = B - A
    seg_len2 = np.sum(seg * seg, axis=1)
    rel = pts[:, None, :] - A[None, :, :]
    t = np.clip(np.einsum("nkd,kd->nk", rel, seg) / seg_len2, 0.0, 1.0)
    foot = A[None] + t[..., None] * seg[None]
    dist2 = np.sum((pts[:, None, :] - foot) ** 2, axis=2)
    k = np.argmin(dist2, axis=1)
    rows = np.arange(len(pts))
    lengths = np.sqrt(seg_len2)
    start = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    total = float(lengths.sum())
    tk = t[rows, k]
    arc = np.mod(start[k] + tk * lengths[k], total)
    return CycleProjection(A, tuple(loop), k, tk, foot[rows, k], arc, total)


def most_persistent_loop(cloud) -> Tuple[int, ...]:
    """Point indices of the representative loop of the most persistent H1
    pair, counterclockwise and starting at its lowest index."""
    pts = cloud.points if isinstance(cloud, PointCloud) else check_points(cloud)
    filt = alpha_filtration(pts)
    loop = representative_cycle(filt, compute_persistence(filt, max_dim=1)[1], 0)
    if signed_area(pts[list(loop)]) < 0:
        loop = (loop[0],) + tuple(reversed(loop[1:]))
    return loop


def cycle_projection(cloud) -> CycleProjection:
    pts = cloud.points if isinstance(cloud, PointCloud) else check_points(cloud)
    loop = most_persistent_loop(pts)
    return project_onto_loop(pts, pts[list(loop)], loop)


def infer_pseudotime(cloud) -> np.ndarray:
    """Circular pseudotime in [0, 2 pi) of every point of a 2-D embedding."""
    return cycle_projection(cloud).pseudotime


def circular_correlation(a, b) -> float:
    """Fisher-Lee circular correlation between two samples of angles."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 3:
        raise LengthMismatchError(
            f"need two equal-length angle vectors with >= 3 entries, got {a.shape} and {b.shape}")
    iu = np.triu_indices(len(a), 1)
    sa = np.sin(a[:, None] - a[None, :])[iu]
    sb = np.sin(b[:, None] - b[None, :])[iu]
    return float(np.sum(sa * sb) / np.sqrt(np.sum(sa * sa) * np.sum(sb * sb)))


def community_separation(embedding, labels) -> float:
    """Mean distance between differently labelled points over the mean
    distance between equally labelled points."""
    E = np.asarray(embedding, dtype=float)
    labels = np.asarray(labels)
    if len(labels) != len(E):
        raise LengthMismatchError(f"{len(labels)} labels for {len(E)} points")
    values, counts = np.unique(labels, return_counts=True)
    if len(values) < 2 or counts.min() < 2:
        raise SingleLabelError("need at least two labels with at least two points each")
    D = pdist(E)
    # pdist lists pairs in row-major upper-triangle order
    same = (labels[:, None] == labels[None, :])[np.triu_indices(len(E), 1)]
    return float(D[~same].mean() / D[same].mean())


def two_means_agreement(embedding, labels, seed: int = 0) -> float:
    """Fraction of points whose 2-means cluster matches their (binary) label,
    under the better of the two cluster-to-label matchings."""
    labels = np.asarray(labels)
    values = np.unique(labels)
    if len(values) != 2:
        raise SingleLabelError(f"need exactly two labels, got {len(values)}")
    assign = KMeans(n_clusters=2, n_init=10, random_state=seed).fit_predict(np.asarray(embedding))
    hit = np.mean(assign == (labels == values[1]))
    return float(max(hit, 1 - hit))


def smaller_cluster_size(embedding, seed: int = 0) -> int:
    """Size of the smaller group of a 2-means split."""
    assign = KMeans(n_clusters=2, n_init=10, random_state=seed).fit_predict(np.asarray(embedding))
    return int(np.bincount(assign, minlength=2).min())
